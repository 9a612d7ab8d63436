#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "planrl/agentloop/actions.hpp"
#include "planrl/agentloop/observe.hpp"
#include "planrl/agentloop/plan.hpp"
#include "planrl/agentloop/trajectory.hpp"
#include "planrl/core/error.hpp"
#include "planrl/core/hash.hpp"
#include "planrl/envsim/task.hpp"
#include "planrl/envsim/wordle.hpp"

namespace planrl::grpo {

// Global action vocabulary over a task set: the four maze moves, the spaced
// wordle guesses, and the get/craft/inventory commands of every crafting
// task. Sorted lexicographically so ids are stable across runs.
class ActionVocab {
public:
  static ActionVocab build(const std::vector<envsim::TaskSpec>& tasks) {
    std::set<std::string> set;
    set.insert("move up");
    set.insert("move down");
    set.insert("move left");
    set.insert("move right");
    for (const auto& t : tasks) {
      if (t.env_kind == envsim::EnvKind::Wordle) {
        for (const auto& w : t.wordle.words) set.insert(envsim::spaced(w));
      } else if (t.env_kind == envsim::EnvKind::TextCraft) {
        set.insert("inventory");
        for (const auto& r : t.craft.recipes) {
          set.insert(r.command());
          for (const auto& [n, item] : r.inputs)
            if (!t.craft.craftable(item)) set.insert("get " + std::to_string(n) + " " + item);
        }
      }
    }
    ActionVocab v;
    v.actions_.assign(set.begin(), set.end());
    for (size_t i = 0; i < v.actions_.size(); ++i) {
      v.exact_[v.actions_[i]] = static_cast<int32_t>(i);
      v.canon_.emplace(agentloop::canonical_action(v.actions_[i]), static_cast<int32_t>(i));
    }
    return v;
  }

  static ActionVocab from_actions(std::vector<std::string> actions) {
    ActionVocab v;
    v.actions_ = std::move(actions);
    for (size_t i = 0; i < v.actions_.size(); ++i) {
      v.exact_[v.actions_[i]] = static_cast<int32_t>(i);
      v.canon_.emplace(agentloop::canonical_action(v.actions_[i]), static_cast<int32_t>(i));
    }
    return v;
  }

  int32_t id(const std::string& action) const {
    auto it = exact_.find(action);
    if (it != exact_.end()) return it->second;
    auto canon = canon_.find(agentloop::canonical_action(action));
    return canon == canon_.end() ? -1 : canon->second;
  }

  const std::string& action(int32_t id) const { return actions_.at(static_cast<size_t>(id)); }
  size_t size() const { return actions_.size(); }
  const std::vector<std::string>& actions() const { return actions_; }

private:
  std::vector<std::string> actions_;
  std::map<std::string, int32_t> exact_;
  std::map<std::string, int32_t> canon_;
};

// Static feature enumeration: shared context features plus one plan-copy and
// one previous-plan-copy feature per vocabulary action.
class FeatureSpace {
public:
  static FeatureSpace build(const ActionVocab& vocab) {
    FeatureSpace fs;
    auto add = [&fs](const std::string& name) {
      fs.index_[name] = static_cast<uint32_t>(fs.names_.size());
      fs.names_.push_back(name);
    };
    add("bias");
    add("role:planner");
    add("role:executor");
    add("env:maze");
    add("env:wordle");
    add("env:textcraft");
    add("budget:low");
    add("budget:mid");
    add("budget:high");
    add("prev_turn_violation");
    for (const char* s : {"dx+", "dx-", "dx0", "dy+", "dy-", "dy0", "wall_up", "wall_down",
                          "wall_left", "wall_right", "offset:first", "offset:later",
                          "hint:move up", "hint:move down", "hint:move left", "hint:move right",
                          "hint:none"})
      add(std::string("maze:") + s);
    for (int a = 1; a <= 6; ++a) add("wordle:attempt:" + std::to_string(a));
    for (int g = 0; g <= 5; ++g) add("wordle:greens:" + std::to_string(g));
    for (int p = 0; p < 5; ++p)
      for (char c = 'a'; c <= 'z'; ++c)
        add("wordle:g" + std::to_string(p) + ":" + std::string(1, c));
    for (char c = 'a'; c <= 'z'; ++c) add("wordle:y:" + std::string(1, c));
    add("craft:can_craft_target");
    add("craft:can_craft_some");
    add("craft:have_target_parts");
    add("plan_says:none");
    add("plan_says:unknown");
    add("prev_plan:none");
    add("prev_plan:unknown");
    for (const auto& a : vocab.actions()) add("plan_says:" + a);
    for (const auto& a : vocab.actions()) add("prev_plan:" + a);
    return fs;
  }

  uint32_t id(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) raise(ErrorKind::Contract, "unknown feature: " + name);
    return it->second;
  }

  size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  uint64_t layout_hash() const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& n : names_) {
      h = fnv1a64(n, h);
      h = fnv1a64("\x1f", h);
    }
    return h;
  }

private:
  std::vector<std::string> names_;
  std::map<std::string, uint32_t> index_;
};

// Observable-state featurizer shared by both policy roles. Everything is
// recovered from observation text and the turn history; hidden environment
// state stays hidden.
class Featurizer {
public:
  Featurizer(const ActionVocab& vocab, const FeatureSpace& space)
      : vocab_(&vocab), space_(&space) {}

  const ActionVocab& vocab() const { return *vocab_; }
  const FeatureSpace& space() const { return *space_; }

  // Legal actions from observable state only. Rule deductions the executor
  // prompt spells out are encoded as masks: maze moves into a visible wall
  // are excluded for the executor, wordle words are filtered to those
  // consistent with all feedback so far.
  std::vector<int32_t> legal_actions(const envsim::TaskSpec& task,
                                     const agentloop::Trajectory& ctx,
                                     bool executor_role = false) const {
    std::vector<int32_t> legal;
    switch (task.env_kind) {
      case envsim::EnvKind::Maze: {
        auto view = agentloop::parse_maze_view(agentloop::last_observation(ctx));
        auto blocked = [&](const char* m) {
          if (!executor_role || !view) return false;
          if (std::string_view(m) == "move up") return view->wall_up;
          if (std::string_view(m) == "move down") return view->wall_down;
          if (std::string_view(m) == "move left") return view->wall_left;
          return view->wall_right;
        };
        for (const char* m : {"move up", "move down", "move left", "move right"})
          if (!blocked(m)) legal.push_back(vocab_->id(m));
        if (legal.empty())
          for (const char* m : {"move up", "move down", "move left", "move right"})
            legal.push_back(vocab_->id(m));
        break;
      }
      case envsim::EnvKind::Wordle: {
        auto history = agentloop::wordle_history(ctx);
        std::set<std::string> guessed;
        for (const auto& [g, fb] : history) guessed.insert(g);
        auto consistent = [&](const std::string& w) {
          for (const auto& [g, fb] : history)
            if (!envsim::feedback_consistent(w, g, fb)) return false;
          return true;
        };
        for (const auto& w : task.wordle.words) {
          if (guessed.count(w) || !consistent(w)) continue;
          int32_t id = vocab_->id(envsim::spaced(w));
          if (id >= 0) legal.push_back(id);
        }
        if (legal.empty())  // fall back to anything untried rather than deadlock
          for (const auto& w : task.wordle.words) {
            if (guessed.count(w)) continue;
            int32_t id = vocab_->id(envsim::spaced(w));
            if (id >= 0) legal.push_back(id);
          }
        if (legal.empty())
          for (const auto& w : task.wordle.words) {
            int32_t id = vocab_->id(envsim::spaced(w));
            if (id >= 0) legal.push_back(id);
          }
        break;
      }
      case envsim::EnvKind::TextCraft: {
        legal.push_back(vocab_->id("inventory"));
        for (const auto& r : task.craft.recipes) {
          int32_t id = vocab_->id(r.command());
          if (id >= 0) legal.push_back(id);
          for (const auto& [n, item] : r.inputs) {
            if (t_craftable(task, item)) continue;
            int32_t gid = vocab_->id("get " + std::to_string(n) + " " + item);
            if (gid >= 0) legal.push_back(gid);
          }
        }
        std::sort(legal.begin(), legal.end());
        legal.erase(std::unique(legal.begin(), legal.end()), legal.end());
        break;
      }
    }
    if (legal.empty()) raise(ErrorKind::Contract, "no legal actions for task");
    return legal;
  }

  // executor role at 1-based turn t, following `plan` (null in react mode)
  std::vector<uint32_t> executor_features(const envsim::TaskSpec& task,
                                          const agentloop::Trajectory& ctx,
                                          const agentloop::GlobalPlan* plan, int t) const {
    std::vector<uint32_t> f;
    add(f, "bias");
    add(f, "role:executor");
    shared_features(f, task, ctx, task.max_turns - (t - 1));
    if (!ctx.turns.empty() && ctx.turns.back().violation) add(f, "prev_turn_violation");

    if (!plan) {
      add(f, "plan_says:none");
    } else if (static_cast<size_t>(t) > plan->steps.size()) {
      add(f, "plan_says:none");
    } else {
      int32_t id = vocab_->id(plan->clause(static_cast<size_t>(t)));
      if (id < 0)
        add(f, "plan_says:unknown");
      else
        add(f, "plan_says:" + vocab_->action(id));
    }
    finish(f);
    return f;
  }

  // planner role proposing plan step i after t completed turns
  std::vector<uint32_t> planner_features(const envsim::TaskSpec& task,
                                         const agentloop::Trajectory& ctx,
                                         const agentloop::GlobalPlan* prev, int t, int i) const {
    std::vector<uint32_t> f;
    add(f, "bias");
    add(f, "role:planner");
    shared_features(f, task, ctx, task.max_turns - t);
    int offset = i - t;
    add(f, offset <= 1 ? "maze:offset:first" : "maze:offset:later");

    if (!prev) {
      add(f, "prev_plan:none");
    } else if (static_cast<size_t>(i) > prev->steps.size()) {
      add(f, "prev_plan:none");
    } else {
      int32_t id = vocab_->id(prev->clause(static_cast<size_t>(i)));
      if (id < 0)
        add(f, "prev_plan:unknown");
      else
        add(f, "prev_plan:" + vocab_->action(id));
    }

    if (task.env_kind == envsim::EnvKind::Maze) {
      if (auto v = agentloop::parse_maze_view(agentloop::last_observation(ctx))) {
        int dx = v->goal.x - v->pos.x;
        int dy = v->goal.y - v->pos.y;
        int ady = std::abs(dy), adx = std::abs(dx);
        std::string hint = "none";
        if (offset <= ady && ady > 0)
          hint = dy > 0 ? "move right" : "move left";
        else if (offset <= ady + adx && adx > 0)
          hint = dx > 0 ? "move down" : "move up";
        add(f, "maze:hint:" + hint);
      }
    }
    finish(f);
    return f;
  }

private:
  static bool t_craftable(const envsim::TaskSpec& task, const std::string& item) {
    return task.craft.craftable(item);
  }

  void add(std::vector<uint32_t>& f, const std::string& name) const {
    f.push_back(space_->id(name));
  }

  static void finish(std::vector<uint32_t>& f) {
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
  }

  void shared_features(std::vector<uint32_t>& f, const envsim::TaskSpec& task,
                       const agentloop::Trajectory& ctx, int remaining) const {
    add(f, "env:" + envsim::env_kind_name(task.env_kind));
    add(f, remaining <= 2 ? "budget:low" : remaining <= 5 ? "budget:mid" : "budget:high");

    switch (task.env_kind) {
      case envsim::EnvKind::Maze: {
        if (auto v = agentloop::parse_maze_view(agentloop::last_observation(ctx))) {
          int dx = v->goal.x - v->pos.x;
          int dy = v->goal.y - v->pos.y;
          add(f, dx > 0 ? "maze:dx+" : dx < 0 ? "maze:dx-" : "maze:dx0");
          add(f, dy > 0 ? "maze:dy+" : dy < 0 ? "maze:dy-" : "maze:dy0");
          if (v->wall_up) add(f, "maze:wall_up");
          if (v->wall_down) add(f, "maze:wall_down");
          if (v->wall_left) add(f, "maze:wall_left");
          if (v->wall_right) add(f, "maze:wall_right");
        }
        break;
      }
      case envsim::EnvKind::Wordle: {
        auto history = agentloop::wordle_history(ctx);
        int attempt = static_cast<int>(history.size()) + 1;
        add(f, "wordle:attempt:" + std::to_string(std::min(attempt, 6)));
        int best_greens = 0;
        for (const auto& [guess, fb] : history) {
          int greens = 0;
          for (int p = 0; p < 5; ++p) {
            if (fb[static_cast<size_t>(p)] == 'g') {
              ++greens;
              add(f, "wordle:g" + std::to_string(p) + ":" + std::string(1, guess[static_cast<size_t>(p)]));
            } else if (fb[static_cast<size_t>(p)] == 'y') {
              add(f, "wordle:y:" + std::string(1, guess[static_cast<size_t>(p)]));
            }
          }
          best_greens = std::max(best_greens, greens);
        }
        add(f, "wordle:greens:" + std::to_string(best_greens));
        break;
      }
      case envsim::EnvKind::TextCraft: {
        auto inv = agentloop::parse_inventory(agentloop::last_observation(ctx));
        auto count_matching = [&](const std::string& generic) {
          int total = 0;
          for (const auto& [item, n] : inv)
            if (envsim::detail::item_matches(item, generic)) total += n;
          return total;
        };
        bool can_some = false, can_target = false, have_parts = false;
        for (const auto& r : task.craft.recipes) {
          bool ok = true;
          bool any = false;
          for (const auto& [n, item] : r.inputs) {
            if (count_matching(item) >= n)
              any = true;
            else
              ok = false;
          }
          if (ok) {
            can_some = true;
            if (r.output == task.craft.target) can_target = true;
          }
          if (any && r.output == task.craft.target) have_parts = true;
        }
        if (can_target) add(f, "craft:can_craft_target");
        if (can_some) add(f, "craft:can_craft_some");
        if (have_parts) add(f, "craft:have_target_parts");
        break;
      }
    }
  }

  const ActionVocab* vocab_;
  const FeatureSpace* space_;
};

}  // namespace planrl::grpo
