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

#ifndef AEGIS_ENVIRONMENT_HPP
#define AEGIS_ENVIRONMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "aegis/core.hpp"

namespace aegis {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; derives independent stream seeds from one root seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0) {
  return mix_seed(mix_seed(mix_seed(root) ^ a) ^ b);
}

inline double uniform(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  void validate(const char* name) const {
    if (!(lo <= hi)) throw ConfigError(std::string(name) + ": interval lower bound exceeds upper");
  }
};

// ---------------------------------------------------------------------------
// Activity

/// Activity probabilities from a (vehicle_id, date, community_area) CSV.
///
/// Vehicles are mapped to users in order of first appearance anywhere in the
/// file; p_i counts the distinct dates the vehicle appears in `region`.
inline std::vector<double> load_activity_probabilities(std::istream& trace, std::size_t n_users,
                                                       int days_in_month, int region = 77) {
  if (days_in_month < 1) throw ConfigError("days_in_month must be positive");
  std::string line;
  std::size_t row = 0;
  if (!std::getline(trace, line)) throw ParseError(0, "missing header row");
  ++row;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "vehicle_id,date,community_area")
    throw ParseError(row, "expected header 'vehicle_id,date,community_area'");

  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::unordered_set<std::string>> days;
  while (std::getline(trace, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cols.push_back(cell);
    if (cols.size() != 3 || cols[0].empty()) throw ParseError(row, "expected 3 columns");
    const std::string& date = cols[1];
    const bool date_ok = date.size() == 10 && date[4] == '-' && date[7] == '-' &&
                         std::all_of(date.begin(), date.end(), [](char c) {
                           return c == '-' || (c >= '0' && c <= '9');
                         });
    if (!date_ok) throw ParseError(row, "date must be YYYY-MM-DD");
    int area = 0;
    try {
      std::size_t used = 0;
      area = std::stoi(cols[2], &used);
      if (used != cols[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(row, "community_area must be an integer");
    }
    auto [it, inserted] = index.try_emplace(cols[0], days.size());
    if (inserted) days.emplace_back();
    if (area == region) days[it->second].insert(date);
  }
  if (days.size() < n_users)
    throw ConfigError("trace has " + std::to_string(days.size()) + " vehicles, need " +
                      std::to_string(n_users));
  std::vector<double> p(n_users);
  for (std::size_t i = 0; i < n_users; ++i)
    p[i] = std::clamp(static_cast<double>(days[i].size()) / days_in_month, 0.0, 1.0);
  return p;
}

inline std::vector<double> synthesize_activity_probabilities(std::size_t n_users,
                                                             std::uint64_t seed,
                                                             Interval range = {0.2, 0.9}) {
  range.validate("activity range");
  Rng rng(seed);
  std::vector<double> p(n_users);
  for (auto& v : p) v = uniform(rng, range.lo, range.hi);
  return p;
}

inline std::vector<std::uint8_t> draw_activation(const std::vector<double>& probs, Rng& rng) {
  std::vector<std::uint8_t> chi(probs.size());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < probs.size(); ++i) chi[i] = u(rng) < probs[i] ? 1 : 0;
  return chi;
}

// ---------------------------------------------------------------------------
// Tasks

struct TaskDistribution {
  Interval data_mb{0.12, 0.90};
  Interval workload_gcycles{0.08, 0.95};
  Interval deadline_s{0.28, 0.82};

  void validate() const {
    data_mb.validate("data_mb");
    workload_gcycles.validate("workload_gcycles");
    deadline_s.validate("deadline_s");
    if (!(data_mb.lo > 0.0 && workload_gcycles.lo > 0.0 && deadline_s.lo > 0.0))
      throw ConfigError("task ranges must be strictly positive");
  }
};

inline TaskSpec draw_task(const TaskDistribution& dist, Rng& rng, double weight = 1.0) {
  TaskSpec t;
  t.data_bits = uniform(rng, dist.data_mb.lo, dist.data_mb.hi) * kBitsPerMegabyte;
  t.workload_cycles = uniform(rng, dist.workload_gcycles.lo, dist.workload_gcycles.hi) *
                      kCyclesPerGigacycle;
  t.deadline_s = uniform(rng, dist.deadline_s.lo, dist.deadline_s.hi);
  t.weight = weight;
  return t;
}

// ---------------------------------------------------------------------------
// Channel: dB-domain AR(1) shadowing per user.

struct ChannelProcess {
  std::vector<double> mean_db;
  double ar_coeff = 0.9;
  double sigma_db = 2.0;
  std::vector<double> state_db;

  void validate() const {
    if (!(std::abs(ar_coeff) < 1.0)) throw ConfigError("AR coefficient must satisfy |phi| < 1");
    if (!(sigma_db >= 0.0)) throw ConfigError("innovation std must be nonnegative");
    if (mean_db.size() != state_db.size()) throw ConfigError("channel state size mismatch");
  }

  std::vector<double> linear_gains() const {
    std::vector<double> g(state_db.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = db_to_linear(state_db[i]);
    return g;
  }

  static double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
  static double linear_to_db(double g) { return 10.0 * std::log10(g); }
};

struct ChannelDistribution {
  Interval mean_db{-100.0, -90.0};
  double ar_coeff = 0.9;
  double sigma_db = 2.0;
};

/// Means drawn per user; initial state drawn from the stationary law.
inline ChannelProcess make_channel_process(std::size_t n_users, const ChannelDistribution& dist,
                                           Rng& rng) {
  ChannelProcess proc;
  proc.ar_coeff = dist.ar_coeff;
  proc.sigma_db = dist.sigma_db;
  proc.mean_db.resize(n_users);
  proc.state_db.resize(n_users);
  const double stationary_sd = dist.sigma_db / std::sqrt(1.0 - dist.ar_coeff * dist.ar_coeff);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (std::size_t i = 0; i < n_users; ++i) {
    proc.mean_db[i] = uniform(rng, dist.mean_db.lo, dist.mean_db.hi);
    proc.state_db[i] = proc.mean_db[i] + stationary_sd * n01(rng);
  }
  proc.validate();
  return proc;
}

/// x <- mu + phi (x - mu) + N(0, sigma^2); returns the new linear gains.
inline std::vector<double> step_channel(ChannelProcess& proc, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  for (std::size_t i = 0; i < proc.state_db.size(); ++i) {
    const double noise = proc.sigma_db * n01(rng);
    proc.state_db[i] = proc.mean_db[i] + proc.ar_coeff * (proc.state_db[i] - proc.mean_db[i]) + noise;
  }
  return proc.linear_gains();
}

inline double compute_sinr(double gain, const RadioParams& radio) {
  return radio.tx_power_w * gain / radio.noise_power_w;
}

// ---------------------------------------------------------------------------
// Edge backlog

struct BacklogProcess {
  double backlog_cycles = 0.0;
  double arrival_max_cycles = 0.0;  // background arrivals ~ U[0, max] per slot
};

inline double sum_compute(const JointActions& profile) {
  double s = 0.0;
  for (const auto& a : profile) s += a.compute_hz;
  return s;
}

inline double sum_bandwidth(const JointActions& profile) {
  double s = 0.0;
  for (const auto& a : profile) s += a.bandwidth_hz;
  return s;
}

/// Q <- max(0, Q + A - (F_tot - sum_f) tau) for a given background arrival A.
inline double next_backlog(double backlog, double arrival, double sum_compute_hz,
                           const ResourcePools& pools) {
  const double service = (pools.total_compute_hz - sum_compute_hz) * pools.slot_duration_s;
  return std::max(0.0, backlog + arrival - service);
}

inline double draw_background_arrival(const BacklogProcess& proc, Rng& rng) {
  return uniform(rng, 0.0, proc.arrival_max_cycles);
}

inline double step_backlog(BacklogProcess& proc, const JointActions& profile,
                           const ResourcePools& pools, Rng& rng) {
  const double arrival = draw_background_arrival(proc, rng);
  proc.backlog_cycles = next_backlog(proc.backlog_cycles, arrival, sum_compute(profile), pools);
  return proc.backlog_cycles;
}

}  // namespace aegis

#endif  // AEGIS_ENVIRONMENT_HPP
