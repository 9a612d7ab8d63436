#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "planrl/core/hash.hpp"
#include "planrl/curriculum/runner.hpp"
#include "planrl/judge/backend.hpp"

namespace planrl::cli {

struct JudgeSettings {
  std::string backend = "none";  // none | mock | http
  std::string url;
  std::string model = "judge";
  std::string token_env = "PLANRL_JUDGE_TOKEN";
  int max_inflight = 8;
  int max_retries = 2;
  std::string debug_log;
};

struct RunConfig {
  uint64_t seed = 1;
  std::string output_dir = "run";
  std::vector<std::string> task_paths;  // files or directories, workdir-relative
  curriculum::ScheduleConfig schedule;
  grpo::GrpoConfig grpo;
  agentloop::EpisodeConfig agent;
  JudgeSettings judge;
  double sanity_floor = 0.1;
  bool log_trajectories = true;
  std::string config_hash;  // fnv64 of the canonical config json
};

inline std::vector<std::filesystem::path> expand_task_files(
    const std::vector<std::string>& paths, const std::filesystem::path& workdir) {
  std::vector<std::filesystem::path> files;
  for (const auto& p : paths) {
    std::filesystem::path full = std::filesystem::path(p).is_absolute() ? std::filesystem::path(p) : workdir / p;
    if (std::filesystem::is_directory(full)) {
      std::vector<std::filesystem::path> here;
      for (const auto& entry : std::filesystem::directory_iterator(full))
        if (entry.path().extension() == ".json") here.push_back(entry.path());
      std::sort(here.begin(), here.end());
      files.insert(files.end(), here.begin(), here.end());
    } else if (std::filesystem::exists(full)) {
      files.push_back(full);
    } else {
      raise(ErrorKind::Io, "task path does not exist: " + full.string());
    }
  }
  return files;
}

inline std::vector<envsim::TaskSpec> load_tasks(const std::vector<std::string>& paths,
                                                const std::filesystem::path& workdir) {
  std::vector<envsim::TaskSpec> tasks;
  for (const auto& file : expand_task_files(paths, workdir))
    tasks.push_back(envsim::load_task_file(file));
  return tasks;
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  cfg.seed = j.value("seed", static_cast<uint64_t>(1));
  cfg.output_dir = j.value("output_dir", std::string("run"));
  if (j.contains("tasks")) cfg.task_paths = j.at("tasks").get<std::vector<std::string>>();
  if (j.contains("schedule")) cfg.schedule = curriculum::schedule_from_json(j.at("schedule"));

  if (j.contains("grpo")) {
    const auto& g = j.at("grpo");
    cfg.grpo.group_size = g.value("group_size", cfg.grpo.group_size);
    cfg.grpo.clip_eps = g.value("clip_eps", cfg.grpo.clip_eps);
    cfg.grpo.kl_beta = g.value("kl_beta", cfg.grpo.kl_beta);
    cfg.grpo.learning_rate = g.value("learning_rate", cfg.grpo.learning_rate);
    cfg.grpo.std_epsilon = g.value("std_epsilon", cfg.grpo.std_epsilon);
    cfg.grpo.temperature = g.value("temperature", cfg.grpo.temperature);
    if (g.contains("stage_temperatures"))
      cfg.grpo.stage_temperatures = g.at("stage_temperatures").get<std::vector<double>>();
    cfg.grpo.groups_per_step = g.value("groups_per_step", cfg.grpo.groups_per_step);
    cfg.grpo.updates_per_step = g.value("updates_per_step", cfg.grpo.updates_per_step);
    cfg.grpo.reset_ref_per_stage = g.value("reset_ref_per_stage", cfg.grpo.reset_ref_per_stage);
  }
  cfg.grpo.validate();

  if (j.contains("agent")) {
    const auto& a = j.at("agent");
    cfg.agent.candidate_count = a.value("candidate_count", cfg.agent.candidate_count);
    cfg.agent.retry_budget = a.value("retry_budget", cfg.agent.retry_budget);
    cfg.agent.adapt_every = a.value("adapt_every", cfg.agent.adapt_every);
    cfg.agent.carryover_candidate = a.value("carryover_candidate", cfg.agent.carryover_candidate);
    if (cfg.agent.candidate_count < 1 || cfg.agent.adapt_every < 1)
      raise(ErrorKind::Validation, "agent: candidate_count and adapt_every must be positive");
  }

  if (j.contains("judge")) {
    const auto& jj = j.at("judge");
    cfg.judge.backend = jj.value("backend", cfg.judge.backend);
    cfg.judge.url = jj.value("url", cfg.judge.url);
    cfg.judge.model = jj.value("model", cfg.judge.model);
    cfg.judge.token_env = jj.value("token_env", cfg.judge.token_env);
    cfg.judge.max_inflight = jj.value("max_inflight", cfg.judge.max_inflight);
    cfg.judge.max_retries = jj.value("max_retries", cfg.judge.max_retries);
    cfg.judge.debug_log = jj.value("debug_log", cfg.judge.debug_log);
    if (cfg.judge.backend != "none" && cfg.judge.backend != "mock" && cfg.judge.backend != "http")
      raise(ErrorKind::Validation, "judge.backend must be none, mock or http");
    if (cfg.judge.backend == "http" && cfg.judge.url.empty())
      raise(ErrorKind::Validation, "judge.backend http requires a url");
  }

  cfg.sanity_floor = j.value("sanity_floor", cfg.sanity_floor);
  cfg.log_trajectories = j.value("log_trajectories", cfg.log_trajectories);
  cfg.config_hash = hex64(fnv1a64(j.dump()));
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::Io, "cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(ErrorKind::Validation, "config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

// deterministic canned verdicts so offline runs exercise the judge path
inline std::shared_ptr<judge::MockBackend> scripted_mock_backend() {
  auto mock = std::make_shared<judge::MockBackend>();
  mock->script_rubric(judge::Rubric::Adherence,
                      "```json\n{\"score\": 2, \"reason\": \"mock verdict\"}\n```");
  mock->script_rubric(judge::Rubric::E2E,
                      "```json\n{\"score\": 1, \"reason\": \"mock verdict\"}\n```");
  mock->script_rubric(judge::Rubric::PlanQuality,
                      "```json\n{\"correctness_score\": 3, \"correctness_reason\": \"mock\", "
                      "\"executability_score\": 3, \"executability_reason\": \"mock\", "
                      "\"standardization_score\": 5, \"standardization_reason\": \"mock\"}\n```");
  mock->script_rubric(judge::Rubric::PlanSelection,
                      "```json\n{\"selected_index\": 0, \"reason\": \"mock\"}\n```");
  mock->script_rubric(judge::Rubric::EnvFeedback, "Observation: nothing unusual happens.");
  return mock;
}

inline std::shared_ptr<judge::JudgeClient> make_judge_client(const JudgeSettings& settings) {
  if (settings.backend == "none") return nullptr;
  if (settings.backend == "mock")
    return std::make_shared<judge::JudgeClient>(scripted_mock_backend(), settings.max_inflight);
  judge::HttpBackendConfig http;
  http.url = settings.url;
  http.model = settings.model;
  http.token_env = settings.token_env;
  http.debug_log_path = settings.debug_log;
  return std::make_shared<judge::JudgeClient>(std::make_shared<judge::HttpBackend>(http),
                                              settings.max_inflight);
}

inline curriculum::RunnerSetup make_runner_setup(const RunConfig& cfg,
                                                 const std::filesystem::path& workdir) {
  curriculum::RunnerSetup setup;
  setup.tasks = load_tasks(cfg.task_paths, workdir);
  if (setup.tasks.empty()) raise(ErrorKind::Usage, "config lists no tasks");
  setup.schedule = cfg.schedule;
  setup.grpo = cfg.grpo;
  setup.agent = cfg.agent;
  std::filesystem::path out = cfg.output_dir;
  setup.output_dir = (out.is_absolute() ? out : workdir / out).string();
  setup.seed = cfg.seed;
  setup.config_hash = cfg.config_hash;
  setup.judge = make_judge_client(cfg.judge);
  setup.sanity_floor = cfg.sanity_floor;
  setup.log_trajectories = cfg.log_trajectories;
  return setup;
}

}  // namespace planrl::cli
