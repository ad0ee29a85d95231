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

#ifndef AEGIS_BASELINES_HPP
#define AEGIS_BASELINES_HPP

#include <algorithm>
#include <array>
#include <numeric>
#include <string>
#include <vector>

#include "aegis/core.hpp"
#include "aegis/environment.hpp"
#include "aegis/game.hpp"
#include "aegis/risk.hpp"

namespace aegis {

enum class PolicyTag { kAegis, kAegisNoBudget, kAegisNoPred, kSloEdge, kDeadlineFirst, kBclf, kEqualShare };

inline constexpr std::array<PolicyTag, 7> kAllPolicies = {
    PolicyTag::kAegis,    PolicyTag::kAegisNoBudget, PolicyTag::kAegisNoPred, PolicyTag::kSloEdge,
    PolicyTag::kDeadlineFirst, PolicyTag::kBclf,     PolicyTag::kEqualShare};

inline const char* to_string(PolicyTag p) {
  switch (p) {
    case PolicyTag::kAegis: return "AEGIS";
    case PolicyTag::kAegisNoBudget: return "AEGISNoBudget";
    case PolicyTag::kAegisNoPred: return "AEGISNoPred";
    case PolicyTag::kSloEdge: return "SLOEdge";
    case PolicyTag::kDeadlineFirst: return "DeadlineFirst";
    case PolicyTag::kBclf: return "BCLF";
    case PolicyTag::kEqualShare: return "EqualShare";
  }
  return "?";
}

inline PolicyTag parse_policy(const std::string& s) {
  for (auto p : kAllPolicies)
    if (s == to_string(p)) return p;
  throw ConfigError("unknown policy '" + s + "'");
}

/// Game-based policies run the improvement loop; the rest allocate in one pass.
inline bool is_game_policy(PolicyTag p) {
  return p == PolicyTag::kAegis || p == PolicyTag::kAegisNoBudget || p == PolicyTag::kAegisNoPred;
}

inline bool uses_forecasts(PolicyTag p) {
  return p == PolicyTag::kAegis || p == PolicyTag::kAegisNoBudget;
}

/// Whether the predicted-risk budget constraint binds for this policy.
inline bool enforces_budget(PolicyTag p) {
  return p == PolicyTag::kAegis || p == PolicyTag::kAegisNoPred;
}

inline GameVariant game_variant(PolicyTag p) {
  return p == PolicyTag::kAegisNoBudget ? GameVariant::without_budget() : GameVariant::full();
}

// ---------------------------------------------------------------------------
// Priority baselines. They see observed (latest measured) states only.

inline std::vector<std::size_t> active_users(const SlotState& s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.num_users(); ++i)
    if (s.is_active(i)) out.push_back(i);
  return out;
}

/// Delay of user i on observed state when the aggregate compute is sum_f.
inline double observed_delay(const SlotState& s, const SystemModel& sys, std::size_t i,
                             const Action& a, double sum_f) {
  return e2e_delay(*s.tasks[i], a, compute_sinr(s.observed_channel[i], sys.radio),
                   s.observed_backlog, sum_f, sys.pools)
      .total;
}

/// Grid actions ordered by total normalized resource share, ties by grid index.
inline std::vector<Action> actions_by_size(const SystemModel& sys) {
  std::vector<Action> acts;
  for (std::size_t b = 0; b < sys.grid.bandwidth_levels.size(); ++b)
    for (std::size_t f = 0; f < sys.grid.compute_levels.size(); ++f) acts.push_back(sys.grid.at(b, f));
  auto share = [&](const Action& a) {
    return a.bandwidth_hz / sys.pools.total_bandwidth_hz + a.compute_hz / sys.pools.total_compute_hz;
  };
  std::stable_sort(acts.begin(), acts.end(),
                   [&](const Action& x, const Action& y) { return share(x) < share(y); });
  return acts;
}

/// Walks `order`, giving each user the smallest action meeting its deadline on
/// the observed state, else the largest action that still fits, else null.
inline JointActions greedy_priority_allocate(const std::vector<std::size_t>& order,
                                             const SlotState& s, const SystemModel& sys) {
  JointActions profile(s.num_users());
  const auto candidates = actions_by_size(sys);
  const double tol_b = sys.pools.total_bandwidth_hz * kPoolRelTolerance;
  const double tol_f = sys.pools.total_compute_hz * kPoolRelTolerance;
  double used_b = 0.0, used_f = 0.0;
  for (std::size_t i : order) {
    if (!s.is_active(i)) throw InvariantError("priority order contains an inactive user");
    const Action* chosen = nullptr;
    const Action* largest = nullptr;
    for (const auto& a : candidates) {
      if (used_b + a.bandwidth_hz > sys.pools.total_bandwidth_hz + tol_b ||
          used_f + a.compute_hz > sys.pools.total_compute_hz + tol_f)
        continue;
      largest = &a;
      if (!chosen && observed_delay(s, sys, i, a, used_f + a.compute_hz) <= s.tasks[i]->deadline_s)
        chosen = &a;
    }
    if (!chosen) chosen = largest;
    if (!chosen) continue;
    profile[i] = *chosen;
    used_b += chosen->bandwidth_hz;
    used_f += chosen->compute_hz;
  }
  return profile;
}

template <typename Key>
std::vector<std::size_t> stable_order(const SlotState& s, Key key) {
  auto order = active_users(s);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  return order;
}

/// Deadline margin of user i at its best action in isolation (own compute only).
inline double reference_margin(const SlotState& s, const SystemModel& sys, std::size_t i) {
  double best = kInfinity;
  for (double b : sys.grid.bandwidth_levels)
    for (double f : sys.grid.compute_levels) best = std::min(best, observed_delay(s, sys, i, {b, f}, f));
  return s.tasks[i]->deadline_s - best;
}

inline std::vector<std::size_t> rank_slo_edge(const SlotState& s, const SystemModel& sys) {
  std::vector<double> margin(s.num_users(), 0.0);
  for (std::size_t i : active_users(s)) margin[i] = reference_margin(s, sys, i);
  return stable_order(s, [&](std::size_t i) { return margin[i]; });
}

inline std::vector<std::size_t> rank_deadline_first(const SlotState& s) {
  return stable_order(s, [&](std::size_t i) { return s.tasks[i]->deadline_s; });
}

inline std::vector<std::size_t> rank_bclf(const SlotState& s) {
  return stable_order(s, [&](std::size_t i) { return -s.observed_channel[i]; });
}

/// Largest level not above `share`; 0 when every level is larger.
inline double snap_down(const std::vector<double>& levels, double share) {
  double out = 0.0;
  for (double v : levels)
    if (v <= share * (1.0 + kPoolRelTolerance)) out = v;
  return out;
}

inline JointActions equal_share_allocate(const SlotState& s, const SystemModel& sys) {
  JointActions profile(s.num_users());
  const auto n = s.num_active();
  if (n == 0) return profile;
  const double b = snap_down(sys.grid.bandwidth_levels, sys.pools.total_bandwidth_hz / n);
  const double f = snap_down(sys.grid.compute_levels, sys.pools.total_compute_hz / n);
  if (b == 0.0 || f == 0.0) return profile;
  for (std::size_t i : active_users(s)) profile[i] = {b, f};
  return profile;
}

// ---------------------------------------------------------------------------
// Game-based ablations.

inline SlotGameResult aegis_no_budget(const SlotState& s, const SystemModel& sys, const GameConfig& cfg) {
  return run_slot_game(s, sys, cfg, GameVariant::without_budget());
}

/// The full game with forecasts replaced by the latest observations.
inline SlotGameResult aegis_no_pred(SlotState s, const SystemModel& sys, const GameConfig& cfg) {
  s.predicted_channel = s.observed_channel;
  s.predicted_backlog = s.observed_backlog;
  return run_slot_game(s, sys, cfg, GameVariant::full());
}

struct PolicyDecision {
  JointActions actions;
  int iterations = 0;
  bool converged = true;
};

/// One slot of `policy`. The state's predicted fields are used only by
/// forecast-driven policies.
inline PolicyDecision schedule(PolicyTag policy, const SlotState& s, const SystemModel& sys,
                               const GameConfig& cfg) {
  auto from_game = [](const SlotGameResult& r) {
    return PolicyDecision{r.profile.actions, r.iterations, r.converged};
  };
  switch (policy) {
    case PolicyTag::kAegis: return from_game(run_slot_game(s, sys, cfg));
    case PolicyTag::kAegisNoBudget: return from_game(aegis_no_budget(s, sys, cfg));
    case PolicyTag::kAegisNoPred: return from_game(aegis_no_pred(s, sys, cfg));
    case PolicyTag::kSloEdge: return {greedy_priority_allocate(rank_slo_edge(s, sys), s, sys)};
    case PolicyTag::kDeadlineFirst: return {greedy_priority_allocate(rank_deadline_first(s), s, sys)};
    case PolicyTag::kBclf: return {greedy_priority_allocate(rank_bclf(s), s, sys)};
    case PolicyTag::kEqualShare: return {equal_share_allocate(s, sys)};
  }
  throw ConfigError("unhandled policy");
}

}  // namespace aegis

#endif  // AEGIS_BASELINES_HPP
