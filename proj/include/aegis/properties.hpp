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

#ifndef AEGIS_PROPERTIES_HPP
#define AEGIS_PROPERTIES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "aegis/core.hpp"
#include "aegis/environment.hpp"
#include "aegis/game.hpp"
#include "aegis/risk.hpp"

// Randomized game instances and the property checks run by `aegis oracle-check`.
namespace aegis {

struct GameInstance {
  SystemModel system;
  SlotState state;
};

struct InstanceShape {
  std::size_t users = 4;
  std::size_t max_active = 4;
  int bandwidth_levels = 8;
  int compute_levels = 8;
};

/// Default-scale pools and tasks, randomized costs, channels, backlog and budgets.
inline GameInstance random_instance(Rng& rng, const InstanceShape& shape) {
  GameInstance g;
  auto& sys = g.system;
  sys.grid = make_action_grid(sys.pools, shape.bandwidth_levels, shape.compute_levels);
  sys.users.resize(shape.users);
  for (std::size_t i = 0; i < shape.users; ++i) {
    auto& u = sys.users[i];
    u.id = i;
    u.weight = uniform(rng, 0.5, 2.0);
    u.risk_sensitivity = uniform(rng, 2.0, 20.0);
    u.budget_cap = 1.0;
    u.cost_bandwidth = uniform(rng, 0.0, 0.3) / sys.pools.total_bandwidth_hz;
    u.cost_compute = uniform(rng, 0.0, 0.3) / sys.pools.total_compute_hz;
    u.risk_regularization = uniform(rng, 0.0, 1.0);
  }

  auto& s = g.state;
  s.active.assign(shape.users, 0);
  std::vector<std::size_t> ids(shape.users);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto n_active = static_cast<std::size_t>(
      std::uniform_int_distribution<std::size_t>(0, std::min(shape.max_active, shape.users))(rng));
  for (std::size_t k = 0; k < n_active; ++k) s.active[ids[k]] = 1;

  const TaskDistribution tasks;
  s.tasks.resize(shape.users);
  s.observed_channel.resize(shape.users);
  s.predicted_channel.resize(shape.users);
  s.budgets.resize(shape.users);
  for (std::size_t i = 0; i < shape.users; ++i) {
    if (s.active[i]) s.tasks[i] = draw_task(tasks, rng, sys.users[i].weight);
    s.predicted_channel[i] = ChannelProcess::db_to_linear(uniform(rng, -106.0, -84.0));
    s.observed_channel[i] = s.predicted_channel[i];
    s.budgets[i] = uniform(rng, 0.0, 1.0);
  }
  s.predicted_backlog = uniform(rng, 0.0, 0.3 * sys.pools.total_compute_hz);
  s.observed_backlog = s.predicted_backlog;
  sys.validate();
  s.validate(sys);
  return g;
}

/// Uniform draw from A_i(t), ignoring feasibility.
inline Action random_action(const SlotGame& game, std::size_t i, Rng& rng) {
  const auto set = game.action_set(i);
  return set[std::uniform_int_distribution<std::size_t>(0, set.size() - 1)(rng)];
}

struct IdentityReport {
  std::size_t fixtures = 0;
  std::size_t violations = 0;
  double max_error = 0.0;
};

/// |(U_i(a') - U_i(a)) - (Phi(a') - Phi(a))| over random unilateral deviations.
inline IdentityReport check_potential_identity(std::size_t fixtures, std::uint64_t seed,
                                               double tolerance = 1e-12) {
  Rng rng(seed);
  IdentityReport r;
  while (r.fixtures < fixtures) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const auto inst = random_instance(rng, {n, n, 8, 8});
    const SlotGame game(inst.state, inst.system);
    JointActions a(n);
    for (std::size_t j = 0; j < n; ++j) a[j] = random_action(game, j, rng);
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    JointActions b = a;
    b[i] = random_action(game, i, rng);
    if (sum_compute(a) > inst.system.pools.total_compute_hz ||
        sum_compute(b) > inst.system.pools.total_compute_hz)
      continue;  // queue delay is undefined past the pool
    const double du = game.marginal_utility(b, i) - game.marginal_utility(a, i);
    const double dphi = game.potential(b) - game.potential(a);
    const double err = std::abs(du - dphi);
    ++r.fixtures;
    r.max_error = std::max(r.max_error, err);
    if (!(err < tolerance)) ++r.violations;
  }
  return r;
}

struct OracleReport {
  std::size_t instances = 0;
  std::size_t brute_not_equilibrium = 0;
  std::size_t near_optimal = 0;  // game potential within the relative gap of the maximum
  double worst_gap = 0.0;
};

/// Relative shortfall of `phi` below `phi_star`, scaled by max(|phi_star|, 1).
inline double potential_gap(double phi, double phi_star) {
  return (phi_star - phi) / std::max(std::abs(phi_star), 1.0);
}

/// Exhaustive comparison on small instances (<= 3 active users, 2x2 grids).
inline OracleReport check_oracle_equivalence(std::size_t instances, std::uint64_t seed,
                                             double relative_gap = 0.05) {
  Rng rng(seed);
  OracleReport r;
  GameConfig cfg;
  for (std::size_t k = 0; k < instances; ++k) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    const auto inst = random_instance(rng, {n, 3, 2, 2});
    const SlotGame game(inst.state, inst.system);
    const auto brute = game.brute_force_max_potential();
    const auto dyn = game.run(cfg);
    ++r.instances;
    if (!game.verify_equilibrium(brute.profile.actions)) ++r.brute_not_equilibrium;
    const double gap = potential_gap(dyn.profile.potential, brute.profile.potential);
    r.worst_gap = std::max(r.worst_gap, gap);
    if (gap <= relative_gap) ++r.near_optimal;
  }
  return r;
}

/// Consistency problems in a finished episode log; empty when clean.
inline std::vector<std::string> audit_episode_log(const EpisodeLog& log, const SystemModel& sys,
                                                  bool budget_constraint) {
  std::vector<std::string> out;
  const auto& pools = sys.pools;
  auto at = [](const SlotRecord& rec) { return "slot " + std::to_string(rec.slot) + ": "; };
  std::vector<double> budget = log.budget_caps;
  for (const auto& rec : log.slots) {
    double sb = 0.0, sf = 0.0;
    for (const auto& a : rec.actions) {
      sb += a.bandwidth_hz;
      sf += a.compute_hz;
    }
    if (sb > pools.total_bandwidth_hz * (1.0 + kPoolRelTolerance) ||
        sf > pools.total_compute_hz * (1.0 + kPoolRelTolerance))
      out.push_back(at(rec) + "pool limit exceeded");
    for (std::size_t i = 0; i < rec.actions.size(); ++i) {
      const bool active = rec.active[i] != 0;
      const bool admitted = !rec.actions[i].is_null();
      if (!active && admitted) out.push_back(at(rec) + "inactive user " + std::to_string(i) + " served");
      if (rec.budget_before[i] != budget[i]) out.push_back(at(rec) + "budget carry-over mismatch");
      if (budget_constraint && active && admitted && rec.predicted_risk[i] > rec.budget_before[i])
        out.push_back(at(rec) + "risk above budget for user " + std::to_string(i));
      const double consumed = (log.exempt_rejected && active && !admitted) ? 0.0 : rec.predicted_risk[i];
      const double expect = update_budget(rec.budget_before[i], active, consumed, log.recovery_rates[i],
                                          log.budget_caps[i]);
      if (rec.budget_after[i] != expect) out.push_back(at(rec) + "budget update mismatch");
      if (!(rec.budget_after[i] >= 0.0 && rec.budget_after[i] <= log.budget_caps[i]))
        out.push_back(at(rec) + "budget outside [0, cap]");
      if (rec.timely[i] && !std::isfinite(rec.realized_delay[i]))
        out.push_back(at(rec) + "timely flag on an unserved task");
      budget[i] = rec.budget_after[i];
    }
  }
  return out;
}

}  // namespace aegis

#endif  // AEGIS_PROPERTIES_HPP
