// Copyright 2026 The AEGIS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AEGIS_GAME_HPP
#define AEGIS_GAME_HPP

#include <cassert>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "aegis/core.hpp"
#include "aegis/environment.hpp"
#include "aegis/risk.hpp"

namespace aegis {

enum class SelectionRule { kLargestGain, kRoundRobin };

inline const char* to_string(SelectionRule r) {
  return r == SelectionRule::kLargestGain ? "largest-gain" : "round-robin";
}

inline SelectionRule parse_selection_rule(const std::string& s) {
  if (s == "largest-gain") return SelectionRule::kLargestGain;
  if (s == "round-robin") return SelectionRule::kRoundRobin;
  throw ConfigError("unknown selection rule '" + s + "'");
}

struct GameConfig {
  double threshold = 1e-9;  // improvement threshold on the potential gain
  int max_iterations = 200;
  SelectionRule rule = SelectionRule::kLargestGain;

  void validate() const {
    if (!(threshold >= 0.0)) throw ConfigError("improvement threshold must be >= 0");
    if (max_iterations < 1) throw ConfigError("iteration cap must be >= 1");
  }
};

/// Which parts of the risk-budget machinery the game uses.
struct GameVariant {
  bool risk_regularization = true;  // gamma term in the potential
  bool budget_constraint = true;    // predicted risk <= remaining budget

  static GameVariant full() { return {}; }
  static GameVariant without_budget() { return {false, false}; }
};

/// Contribution of one user to the potential for a given action and aggregate compute.
struct UserTerm {
  double risk = 0.0;
  double timely_surrogate = 0.0;
  double value = 0.0;
};

/// A joint action together with the quantities derived from it.
struct JointProfile {
  JointActions actions;
  double sum_bandwidth = 0.0;
  double sum_compute = 0.0;
  std::vector<double> risk;              // 0 for inactive users
  std::vector<double> timely_surrogate;  // 0 for inactive users
  double potential = 0.0;
};

struct BestResponse {
  Action action;
  double gain = 0.0;  // potential increase over the current action, >= 0
};

struct SlotGameResult {
  JointProfile profile;
  int iterations = 0;
  bool converged = false;
  std::vector<double> potential_trace;        // potential after each accepted step, starting at a^(0)
  std::vector<std::size_t> improving_counts;  // |I^(k)| at every check
  std::vector<std::size_t> updated_users;
};

struct BruteForceResult {
  JointProfile profile;
  std::size_t feasible_profiles = 0;
};

/// The slot-t risk-budgeted scheduling game over predicted states.
///
/// The potential is always summed over users in index order with the aggregate
/// compute folded the same way, so two evaluations of one joint action agree
/// bit for bit no matter which code path produced them.
class SlotGame {
 public:
  SlotGame(const SlotState& state, const SystemModel& system,
           GameVariant variant = GameVariant::full())
      : state_(state), system_(system), variant_(variant), sinr_(state.num_users()) {
    if (state.num_users() != system.num_users())
      throw InvariantError("slot state and system disagree on the user count");
    for (std::size_t i = 0; i < sinr_.size(); ++i)
      sinr_[i] = compute_sinr(state.predicted_channel[i], system.radio);
    const auto& grid = system.grid;
    candidates_.reserve(grid.size() + 1);
    for (std::size_t b = 0; b < grid.bandwidth_levels.size(); ++b)
      for (std::size_t f = 0; f < grid.compute_levels.size(); ++f) candidates_.push_back(grid.at(b, f));
    candidates_.push_back(Action::null());
  }

  std::size_t num_users() const { return state_.num_users(); }
  bool active(std::size_t i) const { return state_.is_active(i); }
  const SlotState& state() const { return state_; }
  const SystemModel& system() const { return system_; }
  GameVariant variant() const { return variant_; }
  double sinr(std::size_t i) const { return sinr_[i]; }

  /// A_i(t): grid actions in (bandwidth, compute) index order, then null.
  std::vector<Action> action_set(std::size_t i) const {
    if (!active(i)) return {Action::null()};
    return candidates_;
  }

  JointActions null_profile() const { return JointActions(num_users()); }

  static double fold_compute(const JointActions& a) {
    double s = 0.0;
    for (const auto& x : a) s += x.compute_hz;
    return s;
  }
  static double fold_bandwidth(const JointActions& a) {
    double s = 0.0;
    for (const auto& x : a) s += x.bandwidth_hz;
    return s;
  }

  /// Predicted delay of user i under `action` with aggregate compute `sum_f`.
  DelayBreakdown predicted_delay(std::size_t i, const Action& action, double sum_f) const {
    assert(state_.tasks[i]);
    return e2e_delay(*state_.tasks[i], action, sinr_[i], state_.predicted_backlog, sum_f,
                     system_.pools);
  }

  UserTerm term(std::size_t i, const Action& action, double sum_f) const {
    if (!active(i)) return {};
    const auto& u = system_.users[i];
    const double budget_penalty =
        variant_.risk_regularization ? u.risk_regularization / (state_.budgets[i] + system_.pools.budget_eps)
                                     : 0.0;
    UserTerm t;
    if (action.is_null()) {
      t.risk = 1.0;
      t.timely_surrogate = 0.0;
      t.value = -budget_penalty;
      return t;
    }
    const auto risk = assess_risk(state_.tasks[i]->deadline_s, predicted_delay(i, action, sum_f),
                                  u.risk_sensitivity);
    t.risk = risk.risk;
    t.timely_surrogate = risk.timely_surrogate;
    t.value = u.weight * t.timely_surrogate - u.cost_bandwidth * action.bandwidth_hz -
              u.cost_compute * action.compute_hz - budget_penalty * t.risk;
    return t;
  }

  JointProfile evaluate(const JointActions& actions) const {
    check_size(actions);
    JointProfile p;
    p.actions = actions;
    p.sum_bandwidth = fold_bandwidth(actions);
    p.sum_compute = fold_compute(actions);
    p.risk.assign(num_users(), 0.0);
    p.timely_surrogate.assign(num_users(), 0.0);
    double phi = 0.0;
    for (std::size_t j = 0; j < num_users(); ++j) {
      const auto t = term(j, actions[j], p.sum_compute);
      p.risk[j] = t.risk;
      p.timely_surrogate[j] = t.timely_surrogate;
      phi += t.value;
    }
    p.potential = phi;
    return p;
  }

  double potential(const JointActions& actions) const {
    check_size(actions);
    const double sum_f = fold_compute(actions);
    double phi = 0.0;
    for (std::size_t j = 0; j < num_users(); ++j) phi += term(j, actions[j], sum_f).value;
    return phi;
  }

  bool within_pools(double sum_b, double sum_f) const {
    const auto& pools = system_.pools;
    return sum_b <= pools.total_bandwidth_hz * (1.0 + kPoolRelTolerance) &&
           sum_f <= pools.total_compute_hz * (1.0 + kPoolRelTolerance);
  }

  /// Pool limits, per-user risk budgets, inactivity and grid membership.
  bool is_feasible(const JointActions& actions) const {
    check_size(actions);
    const double sum_b = fold_bandwidth(actions);
    const double sum_f = fold_compute(actions);
    if (!within_pools(sum_b, sum_f)) return false;
    for (std::size_t j = 0; j < num_users(); ++j) {
      const auto& a = actions[j];
      if (!active(j)) {
        if (!a.is_null()) return false;
        continue;
      }
      if (!validate_action(a, system_.grid)) return false;
      if (!a.is_null() && variant_.budget_constraint &&
          term(j, a, sum_f).risk > state_.budgets[j])
        return false;
    }
    return true;
  }

  /// U_i(a) = Phi(a) - Phi((0,0), a_-i).
  double marginal_utility(const JointActions& actions, std::size_t i) const {
    JointActions without = actions;
    without[i] = Action::null();
    return potential(actions) - potential(without);
  }

  std::vector<Action> feasible_unilateral_set(const JointActions& actions, std::size_t i) const {
    std::vector<Action> out;
    JointActions trial = actions;
    for (const auto& a : action_set(i)) {
      trial[i] = a;
      if (is_feasible(trial)) out.push_back(a);
    }
    return out;
  }

  /// Feasible best response of user i by full enumeration of A_i(t).
  ///
  /// Ties go to the earliest candidate in action_set() order, so the null
  /// action only wins strictly. The current action is always a candidate,
  /// hence gain >= 0.
  BestResponse best_response(const JointActions& actions, std::size_t i) const {
    check_size(actions);
    const double current = potential(actions);
    BestResponse best{actions[i], 0.0};
    if (!active(i)) return best;

    const std::size_t n = num_users();
    const auto& grid = system_.grid;
    const std::size_t n_bw = grid.bandwidth_levels.size();
    const std::size_t n_cpu = grid.compute_levels.size();
    // Potentials of the grid candidates, NaN when infeasible.
    std::vector<double> phi(n_bw * n_cpu + 1, std::numeric_limits<double>::quiet_NaN());

    JointActions trial = actions;
    std::vector<double> others(n);
    const double sum_b_others = [&] {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) s += actions[j].bandwidth_hz;
      return s;
    }();

    for (std::size_t f = 0; f <= n_cpu; ++f) {
      const bool null_column = f == n_cpu;
      trial[i] = null_column ? Action::null() : Action{grid.bandwidth_levels[0], grid.compute_levels[f]};
      const double sum_f = fold_compute(trial);
      if (!within_pools(0.0, sum_f)) continue;
      bool others_ok = true;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const auto t = term(j, actions[j], sum_f);
        others[j] = t.value;
        if (active(j) && !actions[j].is_null() && variant_.budget_constraint &&
            t.risk > state_.budgets[j])
          others_ok = false;
      }
      if (!others_ok) continue;
      const std::size_t n_b = null_column ? 1 : n_bw;
      for (std::size_t b = 0; b < n_b; ++b) {
        if (!null_column) {
          trial[i].bandwidth_hz = grid.bandwidth_levels[b];
          if (!within_pools(sum_b_others + trial[i].bandwidth_hz, sum_f)) continue;
          // Exact pool check on the canonical fold.
          if (!within_pools(fold_bandwidth(trial), sum_f)) continue;
        }
        const auto own = term(i, trial[i], sum_f);
        if (!null_column && variant_.budget_constraint && own.risk > state_.budgets[i]) continue;
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) total += (j == i) ? own.value : others[j];
        phi[null_column ? n_bw * n_cpu : b * n_cpu + f] = total;
      }
    }

    bool found = false;
    double best_phi = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) {
      if (std::isnan(phi[k])) continue;
      if (!found || phi[k] > best_phi) {
        found = true;
        best_phi = phi[k];
        best.action = candidates_[k];
      }
    }
    assert(found);  // the null action keeps the profile feasible
    if (!(best_phi > current)) return {actions[i], 0.0};
    best.gain = best_phi - current;
    return best;
  }

  /// Asynchronous improvement dynamics from the all-null profile.
  SlotGameResult run(const GameConfig& cfg) const {
    cfg.validate();
    SlotGameResult r;
    JointActions actions = null_profile();
    if (!is_feasible(actions)) throw InvariantError("all-null profile must be feasible");
    r.potential_trace.push_back(potential(actions));
    std::size_t cursor = 0;
    std::vector<BestResponse> responses(num_users());
    for (;;) {
      std::size_t improving = 0;
      for (std::size_t i = 0; i < num_users(); ++i) {
        responses[i] = active(i) ? best_response(actions, i) : BestResponse{actions[i], 0.0};
        if (responses[i].gain > cfg.threshold) ++improving;
      }
      r.improving_counts.push_back(improving);
      if (improving == 0) {
        r.converged = true;
        break;
      }
      if (r.iterations >= cfg.max_iterations) break;
      const std::size_t chosen = select(responses, cfg, cursor);
      actions[chosen] = responses[chosen].action;
      cursor = chosen + 1;
      ++r.iterations;
      r.updated_users.push_back(chosen);
      r.potential_trace.push_back(potential(actions));
    }
    r.profile = evaluate(actions);
    return r;
  }

  /// True iff no user has a feasible unilateral deviation raising U_i by more than `margin`.
  bool verify_equilibrium(const JointActions& actions, double margin = 0.0) const {
    if (!is_feasible(actions)) return false;
    JointActions trial = actions;
    for (std::size_t i = 0; i < num_users(); ++i) {
      const double u_now = marginal_utility(actions, i);
      for (const auto& a : feasible_unilateral_set(actions, i)) {
        trial[i] = a;
        if (marginal_utility(trial, i) > u_now + margin) return false;
      }
      trial[i] = actions[i];
    }
    return true;
  }

  /// Exhaustive maximizer of the potential over the feasible joint-action set.
  /// Refuses when the product of active users' action-set sizes exceeds `cap`.
  BruteForceResult brute_force_max_potential(std::size_t cap = 1'000'000) const {
    std::vector<std::size_t> players;
    for (std::size_t i = 0; i < num_users(); ++i)
      if (active(i)) players.push_back(i);
    const std::size_t per_user = candidates_.size();
    std::size_t space = 1;
    for (std::size_t k = 0; k < players.size(); ++k) {
      if (space > cap / per_user) throw ConfigError("joint action space exceeds the enumeration cap");
      space *= per_user;
    }
    BruteForceResult out;
    JointActions actions = null_profile();
    std::vector<std::size_t> digit(players.size(), 0);
    bool found = false;
    double best = 0.0;
    JointActions best_actions = actions;
    for (std::size_t idx = 0; idx < space; ++idx) {
      for (std::size_t k = 0; k < players.size(); ++k) actions[players[k]] = candidates_[digit[k]];
      if (is_feasible(actions)) {
        ++out.feasible_profiles;
        const double phi = potential(actions);
        if (!found || phi > best) {
          found = true;
          best = phi;
          best_actions = actions;
        }
      }
      for (std::size_t k = 0; k < digit.size(); ++k) {
        if (++digit[k] < per_user) break;
        digit[k] = 0;
      }
    }
    out.profile = evaluate(best_actions);
    return out;
  }

 private:
  void check_size(const JointActions& a) const {
    if (a.size() != num_users()) throw InvariantError("joint action has wrong size");
  }

  std::size_t select(const std::vector<BestResponse>& responses, const GameConfig& cfg,
                     std::size_t cursor) const {
    const std::size_t n = num_users();
    if (cfg.rule == SelectionRule::kRoundRobin) {
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = (cursor + k) % n;
        if (responses[i].gain > cfg.threshold) return i;
      }
    }
    std::size_t chosen = n;
    for (std::size_t i = 0; i < n; ++i)
      if (responses[i].gain > cfg.threshold && (chosen == n || responses[i].gain > responses[chosen].gain))
        chosen = i;
    return chosen;
  }

  const SlotState& state_;
  const SystemModel& system_;
  GameVariant variant_;
  std::vector<double> sinr_;
  std::vector<Action> candidates_;
};

// Free-function forms of the game operations.

inline bool is_feasible_joint(const JointActions& a, const SlotState& s, const SystemModel& sys,
                              GameVariant v = GameVariant::full()) {
  return SlotGame(s, sys, v).is_feasible(a);
}

inline double potential(const JointActions& a, const SlotState& s, const SystemModel& sys,
                        GameVariant v = GameVariant::full()) {
  return SlotGame(s, sys, v).potential(a);
}

inline double marginal_utility(const JointActions& a, std::size_t i, const SlotState& s,
                               const SystemModel& sys, GameVariant v = GameVariant::full()) {
  return SlotGame(s, sys, v).marginal_utility(a, i);
}

inline std::vector<Action> feasible_unilateral_set(const JointActions& a, std::size_t i,
                                                   const SlotState& s, const SystemModel& sys,
                                                   GameVariant v = GameVariant::full()) {
  return SlotGame(s, sys, v).feasible_unilateral_set(a, i);
}

inline BestResponse best_response(const JointActions& a, std::size_t i, const SlotState& s,
                                  const SystemModel& sys, GameVariant v = GameVariant::full()) {
  return SlotGame(s, sys, v).best_response(a, i);
}

inline SlotGameResult run_slot_game(const SlotState& s, const SystemModel& sys,
                                    const GameConfig& cfg, GameVariant v = GameVariant::full()) {
  return SlotGame(s, sys, v).run(cfg);
}

inline bool verify_equilibrium(const JointActions& a, const SlotState& s, const SystemModel& sys,
                               double margin = 0.0, GameVariant v = GameVariant::full()) {
  return SlotGame(s, sys, v).verify_equilibrium(a, margin);
}

inline BruteForceResult brute_force_max_potential(const SlotState& s, const SystemModel& sys,
                                                  std::size_t cap = 1'000'000,
                                                  GameVariant v = GameVariant::full()) {
  return SlotGame(s, sys, v).brute_force_max_potential(cap);
}

}  // namespace aegis

#endif  // AEGIS_GAME_HPP
