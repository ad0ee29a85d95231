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

#ifndef AEGIS_CORE_HPP
#define AEGIS_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aegis {

inline constexpr const char* kVersion = "1.0.0";

// Unit conversions applied once at configuration ingestion.
inline constexpr double kBitsPerMegabyte = 8.0 * 1024.0 * 1024.0;
inline constexpr double kHzPerMegahertz = 1e6;
inline constexpr double kHzPerGigahertz = 1e9;
inline constexpr double kCyclesPerGigacycle = 1e9;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Pool-limit slack for accumulated rounding in sums of grid levels.
inline constexpr double kPoolRelTolerance = 1e-12;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  ParseError(std::size_t row, const std::string& what)
      : std::runtime_error("row " + std::to_string(row) + ": " + what), row(row) {}
  std::size_t row;
};

struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-user parameters of the scheduling model.
struct UserProfile {
  std::size_t id = 0;
  double weight = 1.0;
  double activity_prob = 0.5;
  double risk_sensitivity = 10.0;  // 1/s
  double budget_cap = 1.0;
  double recovery_rate = 0.05;
  double cost_bandwidth = 0.0;  // per Hz
  double cost_compute = 0.0;    // per cycles/s
  double risk_regularization = 0.5;

  void validate() const {
    if (!(weight > 0.0)) throw ConfigError("user " + std::to_string(id) + ": weight must be positive");
    if (!(activity_prob >= 0.0 && activity_prob <= 1.0))
      throw ConfigError("user " + std::to_string(id) + ": activity probability outside [0,1]");
    if (!(risk_sensitivity > 0.0))
      throw ConfigError("user " + std::to_string(id) + ": risk sensitivity must be positive");
    if (!(budget_cap > 0.0 && budget_cap <= 1.0))
      throw ConfigError("user " + std::to_string(id) + ": budget cap outside (0,1]");
    if (!(recovery_rate >= 0.0))
      throw ConfigError("user " + std::to_string(id) + ": recovery rate must be nonnegative");
    if (!(cost_bandwidth >= 0.0 && cost_compute >= 0.0 && risk_regularization >= 0.0))
      throw ConfigError("user " + std::to_string(id) + ": cost coefficients must be nonnegative");
  }
};

/// One inference task: input size in bits, workload in cycles, deadline in seconds.
struct TaskSpec {
  double data_bits = 0.0;
  double workload_cycles = 0.0;
  double deadline_s = 0.0;
  double weight = 1.0;

  void validate() const {
    if (!(data_bits > 0.0 && workload_cycles > 0.0 && deadline_s > 0.0))
      throw ConfigError("task size, workload and deadline must be positive");
  }
};

struct ResourcePools {
  double total_bandwidth_hz = 50.0 * kHzPerMegahertz;
  double total_compute_hz = 155.0 * kHzPerGigahertz;
  double slot_duration_s = 1.0;
  double stability_eps = 1e-6;  // cycles/s
  double budget_eps = 1e-6;

  void validate() const {
    if (!(total_bandwidth_hz > 0.0 && total_compute_hz > 0.0 && slot_duration_s > 0.0))
      throw ConfigError("resource pools and slot duration must be positive");
    if (!(stability_eps > 0.0 && budget_eps > 0.0))
      throw ConfigError("stability constants must be positive");
  }
};

/// Bandwidth (Hz) and compute (cycles/s) granted to one user. (0,0) rejects the task.
struct Action {
  double bandwidth_hz = 0.0;
  double compute_hz = 0.0;

  static constexpr Action null() { return {}; }
  constexpr bool is_null() const { return bandwidth_hz == 0.0 && compute_hz == 0.0; }
  constexpr bool is_well_formed() const {
    return is_null() || (bandwidth_hz > 0.0 && compute_hz > 0.0);
  }
  friend constexpr bool operator==(const Action&, const Action&) = default;
};

using JointActions = std::vector<Action>;

/// Shared discrete candidate levels for bandwidth and compute.
struct ActionGrid {
  std::vector<double> bandwidth_levels;
  std::vector<double> compute_levels;

  std::size_t size() const { return bandwidth_levels.size() * compute_levels.size(); }

  // Non-null actions in row-major (bandwidth, compute) index order.
  Action at(std::size_t bw_index, std::size_t cpu_index) const {
    return {bandwidth_levels[bw_index], compute_levels[cpu_index]};
  }

  void validate(const ResourcePools& pools) const {
    auto check = [](const std::vector<double>& levels, double cap, const char* name) {
      if (levels.empty()) throw ConfigError(std::string(name) + " grid is empty");
      for (std::size_t k = 0; k < levels.size(); ++k) {
        if (!(levels[k] > 0.0)) throw ConfigError(std::string(name) + " levels must be positive");
        if (k > 0 && !(levels[k] > levels[k - 1]))
          throw ConfigError(std::string(name) + " levels must be strictly increasing");
      }
      if (levels.back() > cap) throw ConfigError(std::string(name) + " level exceeds the pool");
    };
    check(bandwidth_levels, pools.total_bandwidth_hz, "bandwidth");
    check(compute_levels, pools.total_compute_hz, "compute");
  }
};

/// Uniform grid {total * k / K : k = 1..K} per resource.
inline ActionGrid make_action_grid(const ResourcePools& pools, int n_bw_levels, int n_cpu_levels) {
  if (n_bw_levels < 1 || n_cpu_levels < 1)
    throw ConfigError("grid level counts must be at least 1");
  ActionGrid grid;
  grid.bandwidth_levels.reserve(static_cast<std::size_t>(n_bw_levels));
  grid.compute_levels.reserve(static_cast<std::size_t>(n_cpu_levels));
  for (int k = 1; k <= n_bw_levels; ++k)
    grid.bandwidth_levels.push_back(pools.total_bandwidth_hz * k / n_bw_levels);
  for (int k = 1; k <= n_cpu_levels; ++k)
    grid.compute_levels.push_back(pools.total_compute_hz * k / n_cpu_levels);
  return grid;
}

inline bool validate_action(const Action& a, const ActionGrid& grid) {
  if (a.is_null()) return true;
  if (!a.is_well_formed()) return false;
  auto member = [](const std::vector<double>& levels, double v) {
    return std::find(levels.begin(), levels.end(), v) != levels.end();
  };
  return member(grid.bandwidth_levels, a.bandwidth_hz) && member(grid.compute_levels, a.compute_hz);
}

/// Transmit power and receiver noise used to turn a channel gain into an SINR.
struct RadioParams {
  double tx_power_w = 0.2;
  double noise_power_w = 1e-13;

  void validate() const {
    if (!(tx_power_w > 0.0 && noise_power_w > 0.0))
      throw ConfigError("transmit and noise power must be positive");
  }
};

/// Everything about the system that stays fixed across slots.
struct SystemModel {
  std::vector<UserProfile> users;
  ResourcePools pools;
  RadioParams radio;
  ActionGrid grid;

  std::size_t num_users() const { return users.size(); }

  void validate() const {
    pools.validate();
    radio.validate();
    grid.validate(pools);
    for (const auto& u : users) u.validate();
  }
};

/// What a scheduler sees at the start of slot t.
///
/// `observed_*` hold the most recent measurements (from slot t-1); `predicted_*`
/// hold the forecasts for slot t. Budgets are the values entering slot t.
struct SlotState {
  int slot = 1;
  std::vector<std::uint8_t> active;
  std::vector<std::optional<TaskSpec>> tasks;
  std::vector<double> observed_channel;
  std::vector<double> predicted_channel;
  double observed_backlog = 0.0;
  double predicted_backlog = 0.0;
  std::vector<double> budgets;

  std::size_t num_users() const { return active.size(); }
  bool is_active(std::size_t i) const { return active[i] != 0; }
  std::size_t num_active() const {
    return static_cast<std::size_t>(std::count(active.begin(), active.end(), std::uint8_t{1}));
  }

  void validate(const SystemModel& system) const {
    const std::size_t n = system.num_users();
    if (slot < 1) throw InvariantError("slot index must be >= 1");
    if (active.size() != n || tasks.size() != n || observed_channel.size() != n ||
        predicted_channel.size() != n || budgets.size() != n)
      throw InvariantError("slot state vectors do not match the user count");
    if (!(observed_backlog >= 0.0 && predicted_backlog >= 0.0))
      throw InvariantError("backlog must be nonnegative");
    for (std::size_t i = 0; i < n; ++i) {
      if (active[i] > 1) throw InvariantError("activity flags must be 0 or 1");
      if (is_active(i) != tasks[i].has_value())
        throw InvariantError("tasks must be present exactly for active users");
      if (tasks[i]) tasks[i]->validate();
      if (!(observed_channel[i] > 0.0 && predicted_channel[i] > 0.0))
        throw InvariantError("channel gains must be positive");
      if (!(budgets[i] >= 0.0 && budgets[i] <= system.users[i].budget_cap))
        throw InvariantError("budget outside [0, cap]");
    }
  }
};

/// Per-slot record of one scheduling decision and its realized outcome.
struct SlotRecord {
  int slot = 0;
  std::vector<std::uint8_t> active;
  std::vector<Action> actions;
  std::vector<double> deadline_s;      // 0 for inactive users
  std::vector<double> realized_delay;  // +inf when not admitted or inactive
  std::vector<std::uint8_t> timely;
  std::vector<double> predicted_risk;  // 1 for rejected active users, 0 for inactive
  std::vector<double> budget_before;
  std::vector<double> budget_after;
  double potential = 0.0;
  int iterations = 0;
  bool converged = true;
  double realized_backlog = 0.0;
};

struct EpisodeLog {
  std::string policy;
  std::uint64_t seed = 0;
  std::vector<double> weights;
  std::vector<double> budget_caps;
  std::vector<double> recovery_rates;
  bool exempt_rejected = false;
  std::vector<SlotRecord> slots;

  std::size_t num_users() const { return weights.size(); }
};

}  // namespace aegis

#endif  // AEGIS_CORE_HPP
