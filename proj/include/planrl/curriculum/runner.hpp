#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "planrl/agentloop/oracle_handles.hpp"
#include "planrl/agentloop/selector.hpp"
#include "planrl/core/text.hpp"
#include "planrl/curriculum/schedule.hpp"
#include "planrl/grpo/train.hpp"

namespace planrl::curriculum {

struct RunnerSetup {
  std::vector<envsim::TaskSpec> tasks;
  ScheduleConfig schedule;
  grpo::GrpoConfig grpo;
  agentloop::EpisodeConfig agent;
  std::string output_dir;
  uint64_t seed = 1;
  std::string config_hash = "0000000000000000";
  std::shared_ptr<judge::JudgeClient> judge;  // optional cross-check path
  double sanity_floor = 0.1;  // mean format reward an epoch must clear
  bool log_trajectories = true;
  int collect_threads = 0;  // 0: one thread per group in the step
};

struct MetricsRow {
  int step = 0;
  int epoch = 0;
  int stage = 0;
  grpo::StepMetrics grpo;
  double format_mean = 0.0;
  double adherence_mean = 0.0;     // [0,2]
  double e2e_mean = 0.0;           // [0,2]
  double plan_quality_mean = 0.0;  // [3,15]
};

struct StageWindowStats {
  double stage1_adherence_first = 0.0;
  double stage1_adherence_last = 0.0;
  double stage2_plan_quality_first = 0.0;
  double stage2_plan_quality_last = 0.0;
  double stage3_e2e_last = 0.0;
};

struct RunReport {
  std::string config_hash;
  uint64_t seed = 0;
  bool halted = false;
  std::string halt_reason;
  int total_steps = 0;
  std::vector<std::string> checkpoints;
  std::vector<MetricsRow> rows;
  StageWindowStats windows;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["halted"] = halted;
    if (halted) j["halt_reason"] = halt_reason;
    j["total_steps"] = total_steps;
    j["checkpoints"] = checkpoints;
    j["windows"] = {{"stage1_adherence_first", windows.stage1_adherence_first},
                    {"stage1_adherence_last", windows.stage1_adherence_last},
                    {"stage2_plan_quality_first", windows.stage2_plan_quality_first},
                    {"stage2_plan_quality_last", windows.stage2_plan_quality_last},
                    {"stage3_e2e_last", windows.stage3_e2e_last}};
    return j;
  }
};

namespace detail {

inline std::string metrics_csv_header() {
  return "step,epoch,stage,mean_reward,mean_abs_advantage,clip_fraction,kl,loss,"
         "format_mean,adherence_mean,e2e_mean,plan_quality_mean,policy_version";
}

inline std::string metrics_csv_row(const MetricsRow& r) {
  std::vector<std::string> cols{
      std::to_string(r.step),
      std::to_string(r.epoch),
      std::to_string(r.stage),
      format_double(r.grpo.mean_reward),
      format_double(r.grpo.mean_abs_advantage),
      format_double(r.grpo.clip_fraction),
      format_double(r.grpo.kl),
      format_double(r.grpo.loss),
      format_double(r.format_mean),
      format_double(r.adherence_mean),
      format_double(r.e2e_mean),
      format_double(r.plan_quality_mean),
      std::to_string(r.grpo.version)};
  return join(cols, ",");
}

// mean of the first/last ceil(20%) entries of the selected column per stage
inline double window_mean(const std::vector<MetricsRow>& rows, int stage, bool last,
                          double (*column)(const MetricsRow&)) {
  std::vector<const MetricsRow*> in_stage;
  for (const auto& r : rows)
    if (r.stage == stage) in_stage.push_back(&r);
  if (in_stage.empty()) return 0.0;
  size_t w = std::max<size_t>(1, in_stage.size() / 5);
  double sum = 0.0;
  if (last)
    for (size_t i = in_stage.size() - w; i < in_stage.size(); ++i) sum += column(*in_stage[i]);
  else
    for (size_t i = 0; i < w; ++i) sum += column(*in_stage[i]);
  return sum / static_cast<double>(w);
}

}  // namespace detail

inline StageWindowStats window_stats(const std::vector<MetricsRow>& rows) {
  StageWindowStats w;
  auto adherence = [](const MetricsRow& r) { return r.adherence_mean; };
  auto plan_quality = [](const MetricsRow& r) { return r.plan_quality_mean; };
  auto e2e = [](const MetricsRow& r) { return r.e2e_mean; };
  w.stage1_adherence_first = detail::window_mean(rows, 1, false, adherence);
  w.stage1_adherence_last = detail::window_mean(rows, 1, true, adherence);
  w.stage2_plan_quality_first = detail::window_mean(rows, 2, false, plan_quality);
  w.stage2_plan_quality_last = detail::window_mean(rows, 2, true, plan_quality);
  w.stage3_e2e_last = detail::window_mean(rows, 3, true, e2e);
  return w;
}

// The progressive training loop: per epoch pick the stage, wire the plan
// provider and reward composition, run optimizer steps over shuffled task
// batches, and snapshot a checkpoint at every stage boundary. All three
// reward curves are scored and logged in every stage; only the stage's own
// components feed the advantages.
inline RunReport run_curriculum(const RunnerSetup& setup) {
  if (setup.tasks.empty()) raise(ErrorKind::Usage, "run_curriculum: task set must be non-empty");
  setup.schedule.validate();
  setup.grpo.validate();
  std::filesystem::create_directories(setup.output_dir);

  grpo::ActionVocab vocab = grpo::ActionVocab::build(setup.tasks);
  grpo::FeatureSpace space = grpo::FeatureSpace::build(vocab);
  grpo::Featurizer featurizer(vocab, space);
  grpo::PolicyParams params = grpo::init_params(featurizer, setup.seed);
  grpo::PolicyParams params_ref = params;

  agentloop::RuleSelector selector;
  agentloop::OraclePlanner external_planner;
  reward::RewardEngine engine;
  if (setup.judge) engine.set_judge(setup.judge);

  RunReport report;
  report.config_hash = setup.config_hash;
  report.seed = setup.seed;

  auto ckpt_path = [&](const std::string& name) {
    return (std::filesystem::path(setup.output_dir) / ("ckpt_" + name + ".json")).string();
  };
  auto save = [&](const std::string& name) {
    std::string path = ckpt_path(name);
    grpo::save_checkpoint(path, params, vocab, space, setup.grpo.temperature, setup.config_hash,
                          setup.seed);
    report.checkpoints.push_back(path);
  };
  save("init");

  std::ofstream metrics(std::filesystem::path(setup.output_dir) / "metrics.csv");
  if (!metrics) raise(ErrorKind::Io, "cannot write metrics.csv under " + setup.output_dir);
  metrics << "# config_hash=" << setup.config_hash << " seed=" << setup.seed << "\n";
  metrics << detail::metrics_csv_header() << "\n";

  std::ofstream tlog;
  if (setup.log_trajectories) {
    tlog.open(std::filesystem::path(setup.output_dir) / "trajectories.jsonl");
    if (!tlog) raise(ErrorKind::Io, "cannot write trajectories.jsonl under " + setup.output_dir);
  }

  int step = 0;
  int epoch = 0;
  for (size_t span_index = 0; span_index < setup.schedule.stages.size(); ++span_index) {
    const StageSpan& span = setup.schedule.stages[span_index];
    if (setup.grpo.reset_ref_per_stage) params_ref = params;

    StagePlanSource source = plan_source_for(span.stage, setup.schedule.joint);
    // flatten any per-stage temperature so sampling and the loss agree
    grpo::GrpoConfig stage_grpo = setup.grpo;
    stage_grpo.temperature = grpo::stage_temperature(setup.grpo, span.stage);
    stage_grpo.stage_temperatures.clear();
    grpo::CollectContext ctx;
    ctx.featurizer = &featurizer;
    ctx.selector = &selector;
    ctx.rewards = &engine;
    ctx.episode_cfg = setup.agent;
    ctx.external_planner = &external_planner;
    ctx.use_external_plans = source.plan_provider == PlanProvider::External;
    ctx.reward_components = stage_components_of(span.stage, setup.schedule.joint);

    for (int e = 0; e < span.epochs; ++e, ++epoch) {
      // stratified shuffle: per-environment order is random, environments are
      // interleaved proportionally so every window of steps sees the same mix
      Rng shuffle_rng(Rng::derive(setup.seed, {0x5F17ull, static_cast<uint64_t>(epoch)}));
      std::vector<std::vector<size_t>> buckets(3);
      for (size_t i = 0; i < setup.tasks.size(); ++i)
        buckets[static_cast<size_t>(setup.tasks[i].env_kind)].push_back(i);
      for (auto& b : buckets) shuffle_rng.shuffle(b);
      std::vector<size_t> order;
      order.reserve(setup.tasks.size());
      std::vector<size_t> taken(3, 0);
      for (size_t n = 0; n < setup.tasks.size(); ++n) {
        // pick the bucket lagging most behind its proportional share
        size_t best = 0;
        double best_lag = -1e9;
        for (size_t b = 0; b < buckets.size(); ++b) {
          if (taken[b] >= buckets[b].size()) continue;
          double share = static_cast<double>(buckets[b].size()) / setup.tasks.size();
          double lag = share * static_cast<double>(n + 1) - static_cast<double>(taken[b]);
          if (lag > best_lag) {
            best_lag = lag;
            best = b;
          }
        }
        order.push_back(buckets[best][taken[best]++]);
      }

      double epoch_format_sum = 0.0;
      size_t epoch_rollouts = 0;

      for (size_t chunk = 0; chunk < order.size();
           chunk += static_cast<size_t>(stage_grpo.groups_per_step)) {
        size_t chunk_end =
            std::min(order.size(), chunk + static_cast<size_t>(stage_grpo.groups_per_step));
        std::vector<grpo::RolloutGroup> batch(chunk_end - chunk);

        // fan out group collection; seeds are fixed per (step, slot) so the
        // thread schedule cannot affect results
        {
          bool serial = setup.collect_threads == 1 || batch.size() == 1;
          std::vector<std::thread> workers;
          for (size_t slot = 0; slot < batch.size(); ++slot) {
            uint64_t group_seed =
                Rng::derive(setup.seed, {0xA11ull, static_cast<uint64_t>(step),
                                         static_cast<uint64_t>(slot)});
            const envsim::TaskSpec& task = setup.tasks[order[chunk + slot]];
            auto work = [&, slot, group_seed, &task = task] {
              batch[slot] =
                  grpo::collect_group(task, params, span.stage, stage_grpo, ctx, group_seed);
            };
            if (serial)
              work();
            else
              workers.emplace_back(work);
          }
          for (auto& w : workers) w.join();
        }

        grpo::StepMetrics step_metrics;
        for (int u = 0; u < setup.grpo.updates_per_step; ++u)
          step_metrics = grpo::train_step(batch, params, params_ref, stage_grpo);

        MetricsRow row;
        row.step = step;
        row.epoch = epoch;
        row.stage = span.stage;
        row.grpo = step_metrics;
        size_t rollouts = 0;
        for (const auto& group : batch) {
          for (const auto& r : group.rollouts) {
            row.format_mean += r.breakdown.format;
            row.adherence_mean += r.breakdown.adherence;
            row.e2e_mean += r.breakdown.e2e;
            row.plan_quality_mean += r.breakdown.plan_quality.total();
            ++rollouts;
          }
        }
        row.format_mean /= static_cast<double>(rollouts);
        row.adherence_mean /= static_cast<double>(rollouts);
        row.e2e_mean /= static_cast<double>(rollouts);
        row.plan_quality_mean /= static_cast<double>(rollouts);
        epoch_format_sum += row.format_mean * static_cast<double>(rollouts);
        epoch_rollouts += rollouts;

        metrics << detail::metrics_csv_row(row) << "\n";
        report.rows.push_back(row);

        if (setup.log_trajectories) {
          for (size_t slot = 0; slot < batch.size(); ++slot) {
            for (size_t g = 0; g < batch[slot].rollouts.size(); ++g) {
              nlohmann::json rec = agentloop::trajectory_to_json(batch[slot].rollouts[g].episode.traj);
              rec["step"] = step;
              rec["task"] = batch[slot].task.id;
              rec["rollout"] = g;
              rec["stage"] = span.stage;
              const reward::RewardBreakdown& rb = batch[slot].rollouts[g].breakdown;
              rec["reward"] = batch[slot].rollouts[g].reward;
              rec["components"] = {{"format", rb.format},
                                   {"adherence", rb.adherence},
                                   {"e2e", rb.e2e},
                                   {"plan_quality", rb.plan_quality.total()}};
              rec["format_turns"] =
                  reward::format_turn_diagnostics(batch[slot].rollouts[g].episode.traj);
              rec["config_hash"] = setup.config_hash;
              rec["seed"] = setup.seed;
              tlog << rec.dump() << "\n";
            }
          }
        }
        ++step;
      }

      double epoch_format = epoch_format_sum / static_cast<double>(epoch_rollouts);
      if (epoch_format < setup.sanity_floor) {
        report.halted = true;
        report.halt_reason = "mean format reward " + format_double(epoch_format) +
                             " fell below the sanity floor " + format_double(setup.sanity_floor) +
                             " after epoch " + std::to_string(epoch);
        break;
      }
    }
    save("stage" + std::to_string(span_index + 1));
    if (report.halted) break;
  }

  report.total_steps = step;
  report.windows = window_stats(report.rows);
  std::ofstream rep(std::filesystem::path(setup.output_dir) / "report.json");
  rep << report.to_json().dump(2) << "\n";
  return report;
}

}  // namespace planrl::curriculum
