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

#ifndef AEGIS_RISK_HPP
#define AEGIS_RISK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "aegis/core.hpp"

// Delay, deadline-margin, risk-surrogate, timeliness and budget arithmetic.
// Realized and predicted quantities go through the same functions; only the
// channel/backlog inputs differ.
namespace aegis {

struct DelayBreakdown {
  double tx = 0.0;
  double queue = 0.0;
  double comp = 0.0;
  double total = kInfinity;

  bool admitted() const { return std::isfinite(total); }
};

struct RiskAssessment {
  double margin = -kInfinity;
  double risk = 1.0;
  double timely_surrogate = 0.0;
};

inline double tx_delay(double data_bits, double bandwidth_hz, double sinr) {
  return data_bits / (bandwidth_hz * std::log2(1.0 + sinr));
}

/// Queueing surrogate Q / (F_tot - sum_f + eps_f).
inline double queue_delay(double backlog_cycles, double sum_compute_hz, const ResourcePools& pools) {
  if (sum_compute_hz > pools.total_compute_hz * (1.0 + kPoolRelTolerance))
    throw InvariantError("aggregate compute exceeds the pool");
  const double residual = std::max(0.0, pools.total_compute_hz - sum_compute_hz);
  return backlog_cycles / (residual + pools.stability_eps);
}

inline double comp_delay(double workload_cycles, double compute_hz) {
  return workload_cycles / compute_hz;
}

/// End-to-end delay of one task; +inf for the null action.
inline DelayBreakdown e2e_delay(const TaskSpec& task, const Action& action, double sinr,
                                double backlog_cycles, double sum_compute_hz,
                                const ResourcePools& pools) {
  if (action.is_null()) return {};
  DelayBreakdown d;
  d.tx = tx_delay(task.data_bits, action.bandwidth_hz, sinr);
  d.queue = queue_delay(backlog_cycles, sum_compute_hz, pools);
  d.comp = comp_delay(task.workload_cycles, action.compute_hz);
  d.total = d.tx + d.queue + d.comp;
  return d;
}

inline double deadline_margin(double deadline_s, double delay_s) { return deadline_s - delay_s; }

/// 1 / (1 + exp(kappa * margin)), evaluated without overflow.
inline double risk_surrogate(double margin_s, double kappa) {
  if (margin_s == -kInfinity) return 1.0;
  if (margin_s == kInfinity) return 0.0;
  const double z = kappa * margin_s;
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

inline RiskAssessment assess_risk(double deadline_s, const DelayBreakdown& delay, double kappa) {
  if (!delay.admitted()) return {};
  RiskAssessment r;
  r.margin = deadline_margin(deadline_s, delay.total);
  r.risk = risk_surrogate(r.margin, kappa);
  r.timely_surrogate = 1.0 - r.risk;
  return r;
}

inline std::uint8_t timely_indicator(double delay_s, double deadline_s) {
  return (std::isfinite(delay_s) && delay_s <= deadline_s) ? 1 : 0;
}

/// B <- min(B_max, max(0, B - chi * r + rho)).
inline double update_budget(double budget, bool active, double risk, double recovery_rate,
                            double budget_cap) {
  const double consumed = active ? risk : 0.0;
  return std::min(budget_cap, std::max(0.0, budget - consumed + recovery_rate));
}

/// Weighted count of timely-served active tasks over the whole episode.
inline double long_term_objective(const EpisodeLog& log) {
  double total = 0.0;
  for (const auto& rec : log.slots)
    for (std::size_t i = 0; i < rec.active.size(); ++i)
      if (rec.active[i] && rec.timely[i]) total += log.weights[i];
  return total;
}

}  // namespace aegis

#endif  // AEGIS_RISK_HPP
