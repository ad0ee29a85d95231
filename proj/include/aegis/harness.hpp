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

#ifndef AEGIS_HARNESS_HPP
#define AEGIS_HARNESS_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aegis/baselines.hpp"
#include "aegis/config.hpp"
#include "aegis/core.hpp"
#include "aegis/environment.hpp"
#include "aegis/game.hpp"
#include "aegis/predictor.hpp"
#include "aegis/risk.hpp"

namespace aegis {

// Stream ids for derive_seed; each random process has its own generator so
// that every policy sees the same activations, tasks, channels and arrivals.
enum class Stream : std::uint64_t { kActivityProbs = 1, kActivation, kTasks, kChannel, kBacklog, kPredictor };

inline std::uint64_t episode_seed(std::uint64_t root, int n_users, int episode) {
  return derive_seed(root, static_cast<std::uint64_t>(n_users), static_cast<std::uint64_t>(episode));
}

inline std::uint64_t stream_seed(std::uint64_t episode, Stream s) {
  return derive_seed(episode, static_cast<std::uint64_t>(s));
}

/// Activity probabilities for the first n_users: trace file if configured,
/// otherwise synthesized from the root seed (prefix-stable in n_users).
inline std::vector<double> activity_probabilities(const ExperimentConfig& cfg, std::size_t n_users) {
  const auto& act = cfg.scenario.activity;
  if (!act.trace.empty()) {
    std::ifstream in(act.trace);
    if (!in) throw ConfigError("cannot open activity trace '" + act.trace + "'");
    return load_activity_probabilities(in, n_users, act.days_in_month, act.region);
  }
  return synthesize_activity_probabilities(
      n_users, derive_seed(cfg.seed, static_cast<std::uint64_t>(Stream::kActivityProbs)), act.range);
}

/// Closed loop for one episode: forecast, schedule, realize, update budgets.
///
/// Timeline of slot t: the scheduler sees observations up to t-1 (and, for
/// forecast-driven policies, LSTM forecasts of t). The channel and backlog of
/// slot t are then revealed and determine the realized delays.
/// Channel forecasts for slots 1..horizon of one episode, indexed [t-1][user].
using ChannelForecastTrace = std::vector<std::vector<double>>;

/// Runs the per-user channel predictors over the episode's channel stream.
/// The stream does not depend on the policy, so every forecast-driven policy
/// of a paired episode sees the same trace.
inline ChannelForecastTrace forecast_channel_trace(const ExperimentConfig& cfg, std::size_t n_users,
                                                   std::uint64_t seed) {
  const auto& sc = cfg.scenario;
  Rng ch_rng(stream_seed(seed, Stream::kChannel));
  ChannelProcess channel = make_channel_process(n_users, sc.channel, ch_rng);
  PredictorBank bank(n_users, sc.predictor, stream_seed(seed, Stream::kPredictor));
  ChannelForecastTrace trace;
  trace.reserve(static_cast<std::size_t>(cfg.horizon));
  auto observe = [&](const std::vector<double>& gains) {
    for (std::size_t i = 0; i < n_users; ++i) bank.channel[i].observe(ChannelProcess::linear_to_db(gains[i]));
  };
  observe(channel.linear_gains());
  for (int t = 1; t <= cfg.horizon; ++t) {
    trace.push_back(predict_channels(bank));
    observe(step_channel(channel, ch_rng));
  }
  return trace;
}

/// Optional inputs and callbacks of run_episode.
struct EpisodeHooks {
  // Precomputed forecasts for forecast-driven policies; computed on demand when null.
  const ChannelForecastTrace* channel_forecasts = nullptr;
  // Called after every scheduling decision, before the slot is realized.
  std::function<void(const SlotState&, const SystemModel&, const PolicyDecision&)> on_decision;
};

inline EpisodeLog run_episode(const ExperimentConfig& cfg, const std::vector<double>& activity,
                              PolicyTag policy, std::uint64_t seed, const EpisodeHooks& hooks = {}) {
  cfg.validate();
  const auto& sc = cfg.scenario;
  const SystemModel sys = build_system(sc, activity);
  const std::size_t n = sys.num_users();

  Rng act_rng(stream_seed(seed, Stream::kActivation));
  Rng task_rng(stream_seed(seed, Stream::kTasks));
  Rng ch_rng(stream_seed(seed, Stream::kChannel));
  Rng bl_rng(stream_seed(seed, Stream::kBacklog));

  ChannelProcess channel = make_channel_process(n, sc.channel, ch_rng);
  BacklogProcess backlog{sc.backlog.initial_gcycles * kCyclesPerGigacycle,
                         sc.backlog.arrival_max_fraction * sc.pools.total_compute_hz * sc.pools.slot_duration_s};

  ObservationHistory history(n);
  const bool forecasting = uses_forecasts(policy);
  const ChannelForecastTrace* channel_forecasts = hooks.channel_forecasts;
  ChannelForecastTrace own_trace;
  if (forecasting && !channel_forecasts) {
    own_trace = forecast_channel_trace(cfg, n, seed);
    channel_forecasts = &own_trace;
  }
  if (forecasting && (channel_forecasts->size() != static_cast<std::size_t>(cfg.horizon) ||
                      (cfg.horizon > 0 && channel_forecasts->front().size() != n)))
    throw ConfigError("channel forecast trace does not match the episode");
  std::optional<SeriesPredictor> load;
  if (forecasting) load.emplace(sc.predictor, PredictorBank::load_seed(stream_seed(seed, Stream::kPredictor)));
  history.observe(channel.linear_gains(), backlog.backlog_cycles);
  if (load) load->observe(backlog.backlog_cycles);

  EpisodeLog log;
  log.policy = to_string(policy);
  log.seed = seed;
  log.exempt_rejected = sc.exempt_rejected;
  for (const auto& u : sys.users) {
    log.weights.push_back(u.weight);
    log.budget_caps.push_back(u.budget_cap);
    log.recovery_rates.push_back(u.recovery_rate);
  }

  std::vector<double> budgets = log.budget_caps;
  JointActions previous(n);
  const GameVariant variant = game_variant(policy);

  for (int t = 1; t <= cfg.horizon; ++t) {
    auto fail = [&](const std::string& what) {
      throw InvariantError(log.policy + " slot " + std::to_string(t) + ": " + what);
    };

    SlotState state;
    state.slot = t;
    state.active = draw_activation(activity, act_rng);
    state.tasks.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      if (state.active[i]) state.tasks[i] = draw_task(sc.tasks, task_rng, sys.users[i].weight);
    const auto latest = last_observation_predict(history);
    state.observed_channel = latest.channel;
    state.observed_backlog = latest.backlog;
    if (forecasting) {
      state.predicted_channel = (*channel_forecasts)[static_cast<std::size_t>(t - 1)];
      state.predicted_backlog = std::max(0.0, load->predict());
    } else {
      state.predicted_channel = latest.channel;
      state.predicted_backlog = latest.backlog;
    }
    state.budgets = budgets;
    state.validate(sys);

    const PolicyDecision decision = schedule(policy, state, sys, sc.game);
    if (hooks.on_decision) hooks.on_decision(state, sys, decision);
    const SlotGame game(state, sys, variant);
    const JointProfile profile = game.evaluate(decision.actions);

    // Constraint checks on the chosen profile.
    if (!game.within_pools(profile.sum_bandwidth, profile.sum_compute)) fail("pool limits violated");
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = decision.actions[i];
      if (!validate_action(a, sys.grid)) fail("action off the grid for user " + std::to_string(i));
      if (!state.active[i] && !a.is_null()) fail("inactive user " + std::to_string(i) + " holds resources");
      if (enforces_budget(policy) && state.active[i] && !a.is_null() && profile.risk[i] > budgets[i])
        fail("risk budget exceeded for user " + std::to_string(i));
    }
    if (decision.iterations > sc.game.max_iterations) fail("iteration cap exceeded");

    // Reveal slot-t channel and backlog.
    const auto gains = step_channel(channel, ch_rng);
    const double realized_backlog = step_backlog(backlog, previous, sc.pools, bl_rng);

    SlotRecord rec;
    rec.slot = t;
    rec.active = state.active;
    rec.actions = decision.actions;
    rec.deadline_s.assign(n, 0.0);
    rec.realized_delay.assign(n, kInfinity);
    rec.timely.assign(n, 0);
    rec.predicted_risk.assign(n, 0.0);
    rec.budget_before = budgets;
    rec.potential = profile.potential;
    rec.iterations = decision.iterations;
    rec.converged = decision.converged;
    rec.realized_backlog = realized_backlog;
    for (std::size_t i = 0; i < n; ++i) {
      if (!state.active[i]) continue;
      const auto& task = *state.tasks[i];
      rec.deadline_s[i] = task.deadline_s;
      rec.predicted_risk[i] = profile.risk[i];
      rec.realized_delay[i] = e2e_delay(task, decision.actions[i], compute_sinr(gains[i], sys.radio),
                                        realized_backlog, profile.sum_compute, sys.pools)
                                  .total;
      rec.timely[i] = timely_indicator(rec.realized_delay[i], task.deadline_s);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const bool rejected = state.active[i] && decision.actions[i].is_null();
      const double consumed = (rejected && sc.exempt_rejected) ? 0.0 : rec.predicted_risk[i];
      budgets[i] = update_budget(budgets[i], state.active[i] != 0, consumed, sys.users[i].recovery_rate,
                                 sys.users[i].budget_cap);
      if (!(budgets[i] >= 0.0 && budgets[i] <= sys.users[i].budget_cap)) fail("budget left [0, cap]");
    }
    rec.budget_after = budgets;
    log.slots.push_back(std::move(rec));

    history.observe(gains, realized_backlog);
    if (load) load->observe(realized_backlog);
    previous = decision.actions;
  }
  return log;
}

inline EpisodeLog run_episode(const ExperimentConfig& cfg, int n_users, PolicyTag policy, int episode) {
  return run_episode(cfg, activity_probabilities(cfg, static_cast<std::size_t>(n_users)), policy,
                     episode_seed(cfg.seed, n_users, episode));
}

// ---------------------------------------------------------------------------
// Metrics

/// A metric value; `defined` is false when its denominator was empty.
struct Metric {
  double value = 0.0;
  bool defined = true;
};

/// Timely inference ratio over active tasks; 1.0 (undefined) with no active tasks.
inline Metric metric_tir(const EpisodeLog& log) {
  double active = 0.0, timely = 0.0;
  for (const auto& r : log.slots)
    for (std::size_t i = 0; i < r.active.size(); ++i)
      if (r.active[i]) {
        active += 1.0;
        timely += r.timely[i];
      }
  if (active == 0.0) return {1.0, false};
  return {timely / active, true};
}

/// Mean predicted risk of the chosen profile over active (user, slot) pairs.
inline Metric metric_avr(const EpisodeLog& log) {
  double count = 0.0, sum = 0.0;
  for (const auto& r : log.slots)
    for (std::size_t i = 0; i < r.active.size(); ++i)
      if (r.active[i]) {
        count += 1.0;
        sum += r.predicted_risk[i];
      }
  if (count == 0.0) return {0.0, false};
  return {sum / count, true};
}

/// Mean length of maximal runs of consecutive untimely active slots, per user.
/// Timely service and inactive slots both end a run.
inline Metric metric_dvbl(const EpisodeLog& log) {
  double runs = 0.0, total = 0.0;
  for (std::size_t i = 0; i < log.num_users(); ++i) {
    int current = 0;
    auto close = [&] {
      if (current > 0) {
        runs += 1.0;
        total += current;
      }
      current = 0;
    };
    for (const auto& r : log.slots) {
      if (r.active[i] && !r.timely[i])
        ++current;
      else
        close();
    }
    close();
  }
  if (runs == 0.0) return {0.0, true};
  return {total / runs, true};
}

/// Mean realized delay of admitted tasks.
inline Metric metric_aed(const EpisodeLog& log) {
  double count = 0.0, sum = 0.0;
  for (const auto& r : log.slots)
    for (std::size_t i = 0; i < r.active.size(); ++i)
      if (r.active[i] && !r.actions[i].is_null() && std::isfinite(r.realized_delay[i])) {
        count += 1.0;
        sum += r.realized_delay[i];
      }
  if (count == 0.0) return {0.0, false};
  return {sum / count, true};
}

/// Mean per-slot potential of the chosen profile.
inline Metric metric_asu(const EpisodeLog& log) {
  if (log.slots.empty()) return {0.0, false};
  double sum = 0.0;
  for (const auto& r : log.slots) sum += r.potential;
  return {sum / static_cast<double>(log.slots.size()), true};
}

/// Mean per-slot improvement iterations (0 for one-pass policies).
inline Metric metric_cr(const EpisodeLog& log) {
  if (log.slots.empty()) return {0.0, false};
  double sum = 0.0;
  for (const auto& r : log.slots) sum += r.iterations;
  return {sum / static_cast<double>(log.slots.size()), true};
}

struct EpisodeMetrics {
  double tir = 0.0, avr = 0.0, dvbl = 0.0, aed = 0.0, asu = 0.0, cr = 0.0;
};

inline EpisodeMetrics compute_metrics(const EpisodeLog& log) {
  return {metric_tir(log).value, metric_avr(log).value, metric_dvbl(log).value,
          metric_aed(log).value, metric_asu(log).value, metric_cr(log).value};
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single episode
};

inline MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double sq = 0.0;
    for (double x : xs) sq += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(sq / static_cast<double>(xs.size() - 1));
  }
  return out;
}

struct MetricsRow {
  std::string policy;
  int n_users = 0;
  int episodes = 0;
  MeanStd tir, avr, dvbl, aed, asu, cr;
};

inline MetricsRow aggregate(const std::string& policy, int n_users, const std::vector<EpisodeMetrics>& eps) {
  MetricsRow row;
  row.policy = policy;
  row.n_users = n_users;
  row.episodes = static_cast<int>(eps.size());
  auto column = [&](double EpisodeMetrics::*m) {
    std::vector<double> xs;
    for (const auto& e : eps) xs.push_back(e.*m);
    return mean_std(xs);
  };
  row.tir = column(&EpisodeMetrics::tir);
  row.avr = column(&EpisodeMetrics::avr);
  row.dvbl = column(&EpisodeMetrics::dvbl);
  row.aed = column(&EpisodeMetrics::aed);
  row.asu = column(&EpisodeMetrics::asu);
  row.cr = column(&EpisodeMetrics::cr);
  return row;
}

using EpisodeObserver = std::function<void(const EpisodeLog&)>;
using RowObserver = std::function<void(const MetricsRow&)>;

/// All (n_users, policy) points, `episodes` paired seeds each. Rows are
/// reported through `on_row` as soon as each point finishes.
inline std::vector<MetricsRow> run_sweep(const ExperimentConfig& cfg, const RowObserver& on_row = {},
                                         const EpisodeObserver& on_episode = {}) {
  cfg.validate();
  std::vector<MetricsRow> rows;
  for (int n_users : cfg.users) {
    const auto activity = activity_probabilities(cfg, static_cast<std::size_t>(n_users));
    std::vector<ChannelForecastTrace> traces(static_cast<std::size_t>(cfg.episodes));
    for (PolicyTag policy : cfg.policies) {
      std::vector<EpisodeMetrics> eps;
      for (int e = 0; e < cfg.episodes; ++e) {
        const auto seed = episode_seed(cfg.seed, n_users, e);
        auto& trace = traces[static_cast<std::size_t>(e)];
        if (uses_forecasts(policy) && trace.empty())
          trace = forecast_channel_trace(cfg, static_cast<std::size_t>(n_users), seed);
        EpisodeHooks hooks;
        if (uses_forecasts(policy)) hooks.channel_forecasts = &trace;
        const auto log = run_episode(cfg, activity, policy, seed, hooks);
        if (on_episode) on_episode(log);
        eps.push_back(compute_metrics(log));
      }
      rows.push_back(aggregate(to_string(policy), n_users, eps));
      if (on_row) on_row(rows.back());
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output files

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline const char* kMetricsHeader =
    "policy,n_users,episodes,tir_mean,tir_std,avr_mean,avr_std,dvbl_mean,dvbl_std,aed_mean,aed_std,"
    "asu_mean,asu_std,cr_mean,cr_std";

inline std::string metrics_csv_line(const MetricsRow& r) {
  std::ostringstream o;
  o << r.policy << ',' << r.n_users << ',' << r.episodes;
  for (const MeanStd* m : {&r.tir, &r.avr, &r.dvbl, &r.aed, &r.asu, &r.cr})
    o << ',' << format_number(m->mean) << ',' << format_number(m->std);
  return o.str();
}

struct FigureSeries {
  const char* file;
  MeanStd MetricsRow::*metric;
};

// Figure 2: reliability/stability; figure 3: efficiency/utility/overhead.
inline const FigureSeries kFigureSeries[] = {
    {"fig2a_tir.csv", &MetricsRow::tir}, {"fig2b_avr.csv", &MetricsRow::avr},
    {"fig2c_dvbl.csv", &MetricsRow::dvbl}, {"fig3a_aed.csv", &MetricsRow::aed},
    {"fig3b_asu.csv", &MetricsRow::asu}, {"fig3c_cr.csv", &MetricsRow::cr}};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
}

/// metrics.csv, one plot-data CSV per figure panel and manifest.json.
inline void emit_outputs(const std::vector<MetricsRow>& rows, const ExperimentConfig& cfg,
                         const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw std::runtime_error("cannot create output directory '" + dir.string() + "'");

  std::string metrics = std::string(kMetricsHeader) + "\n";
  for (const auto& r : rows) metrics += metrics_csv_line(r) + "\n";
  write_file(dir / "metrics.csv", metrics);

  for (const auto& fig : kFigureSeries) {
    std::string s = "n_users,policy,mean,std\n";
    for (const auto& r : rows) {
      const MeanStd& m = r.*(fig.metric);
      s += std::to_string(r.n_users) + "," + r.policy + "," + format_number(m.mean) + "," +
           format_number(m.std) + "\n";
    }
    write_file(dir / fig.file, s);
  }

  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  Json manifest{{"config_hash", hash},
                {"seed", cfg.seed},
                {"version", kVersion},
                {"compiler", __VERSION__},
                {"cxx_standard", static_cast<long>(__cplusplus)},
                {"config", config_to_json(cfg)}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

/// Per-user-per-slot table of one episode.
inline std::string episode_csv(const EpisodeLog& log) {
  std::ostringstream o;
  o << "slot,user,active,bandwidth_hz,compute_hz,deadline_s,delay_s,timely,predicted_risk,"
       "budget_before,budget_after\n";
  for (const auto& r : log.slots)
    for (std::size_t i = 0; i < r.active.size(); ++i)
      o << r.slot << ',' << i << ',' << int(r.active[i]) << ',' << format_number(r.actions[i].bandwidth_hz)
        << ',' << format_number(r.actions[i].compute_hz) << ',' << format_number(r.deadline_s[i]) << ','
        << format_number(r.realized_delay[i]) << ',' << int(r.timely[i]) << ','
        << format_number(r.predicted_risk[i]) << ',' << format_number(r.budget_before[i]) << ','
        << format_number(r.budget_after[i]) << '\n';
  return o.str();
}

inline std::string slots_csv(const EpisodeLog& log) {
  std::ostringstream o;
  o << "slot,potential,iterations,converged,realized_backlog\n";
  for (const auto& r : log.slots)
    o << r.slot << ',' << format_number(r.potential) << ',' << r.iterations << ',' << int(r.converged)
      << ',' << format_number(r.realized_backlog) << '\n';
  return o.str();
}

}  // namespace aegis

#endif  // AEGIS_HARNESS_HPP
