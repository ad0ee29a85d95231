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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "aegis/harness.hpp"
#include "aegis/properties.hpp"

namespace aegis {
namespace {

SlotRecord record(std::vector<std::uint8_t> active, std::vector<std::uint8_t> timely) {
  SlotRecord r;
  const std::size_t n = active.size();
  r.active = active;
  r.timely = timely;
  r.actions.assign(n, Action::null());
  r.realized_delay.assign(n, kInfinity);
  r.predicted_risk.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (active[i]) r.predicted_risk[i] = 1.0;
  return r;
}

EpisodeLog log_of(std::vector<SlotRecord> slots) {
  EpisodeLog log;
  log.weights.assign(slots.front().active.size(), 1.0);
  log.slots = std::move(slots);
  return log;
}

TEST(Metrics, TimelyRatio) {
  // 5 active pairs, 4 timely.
  const auto log = log_of({record({1, 1}, {1, 1}), record({1, 0}, {0, 0}), record({1, 1}, {1, 1})});
  EXPECT_DOUBLE_EQ(metric_tir(log).value, 0.8);
  EXPECT_EQ(metric_tir(log_of({record({1, 1}, {1, 1})})).value, 1.0);
  EXPECT_EQ(metric_tir(log_of({record({1, 1}, {0, 0})})).value, 0.0);
  const auto empty = metric_tir(log_of({record({0, 0}, {0, 0})}));
  EXPECT_EQ(empty.value, 1.0);
  EXPECT_FALSE(empty.defined);
}

TEST(Metrics, ViolationRisk) {
  auto a = record({1, 1, 0}, {0, 0, 0});
  auto b = record({0, 1, 0}, {0, 1, 0});
  a.predicted_risk = {1.0, 0.3, 0.0};
  b.predicted_risk = {0.0, 0.2, 0.0};
  EXPECT_DOUBLE_EQ(metric_avr(log_of({a, b})).value, 0.5);
  auto single = record({1}, {1});
  single.predicted_risk = {0.3};
  EXPECT_DOUBLE_EQ(metric_avr(log_of({single})).value, 0.3);
  EXPECT_EQ(metric_avr(log_of({record({1, 1}, {0, 0})})).value, 1.0);
}

TEST(Metrics, BurstLength) {
  EXPECT_DOUBLE_EQ(metric_dvbl(log_of({record({1}, {0}), record({1}, {0}), record({1}, {1}), record({1}, {0})})).value,
                   1.5);
  EXPECT_EQ(metric_dvbl(log_of({record({1}, {1}), record({1}, {1})})).value, 0.0);
  EXPECT_DOUBLE_EQ(metric_dvbl(log_of({record({1}, {0}), record({0}, {0}), record({1}, {0})})).value, 1.0);
  // Runs are per user: user 0 has {3}, user 1 has {1, 1}.
  EXPECT_DOUBLE_EQ(
      metric_dvbl(log_of({record({1, 1}, {0, 0}), record({1, 1}, {0, 1}), record({1, 1}, {0, 0})})).value,
      5.0 / 3.0);
}

TEST(Metrics, Delay) {
  auto r = record({1, 1, 1}, {1, 0, 0});
  r.actions[0] = {1e6, 1e9};
  r.realized_delay[0] = 0.33;
  EXPECT_DOUBLE_EQ(metric_aed(log_of({r})).value, 0.33);
  auto s = record({1, 1, 0}, {1, 1, 0});
  s.actions[0] = s.actions[1] = {1e6, 1e9};
  s.realized_delay[0] = 0.1;
  s.realized_delay[1] = 0.5;
  EXPECT_DOUBLE_EQ(metric_aed(log_of({r, s})).value, (0.33 + 0.1 + 0.5) / 3.0);
}

TEST(Metrics, UtilityAndRounds) {
  auto a = record({1}, {1});
  auto b = record({0}, {0});
  a.potential = 2.0;
  a.iterations = 3;
  b.potential = 0.0;
  b.iterations = 0;
  EXPECT_EQ(metric_asu(log_of({a})).value, 2.0);
  EXPECT_EQ(metric_asu(log_of({a, b})).value, 1.0);
  EXPECT_EQ(metric_cr(log_of({a, a})).value, 3.0);
  EXPECT_EQ(metric_cr(log_of({a, b})).value, 1.5);
}

TEST(Metrics, AggregateUsesSampleStd) {
  std::vector<EpisodeMetrics> eps(3);
  eps[0].tir = 0.2;
  eps[1].tir = 0.4;
  eps[2].tir = 0.6;
  const auto row = aggregate("AEGIS", 10, eps);
  EXPECT_DOUBLE_EQ(row.tir.mean, 0.4);
  EXPECT_DOUBLE_EQ(row.tir.std, 0.2);
  EXPECT_EQ(mean_std({5.0}).std, 0.0);
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.horizon = 25;
  cfg.episodes = 2;
  cfg.users = {6};
  return cfg;
}

TEST(Episode, DeterministicAndPaired) {
  const auto cfg = small_config();
  const auto a = run_episode(cfg, 6, PolicyTag::kAegis, 0);
  const auto b = run_episode(cfg, 6, PolicyTag::kAegis, 0);
  EXPECT_EQ(episode_csv(a), episode_csv(b));
  EXPECT_EQ(slots_csv(a), slots_csv(b));
  const auto c = run_episode(cfg, 6, PolicyTag::kSloEdge, 0);
  const auto d = run_episode(cfg, 6, PolicyTag::kAegis, 1);
  for (std::size_t t = 0; t < a.slots.size(); ++t) {
    EXPECT_EQ(a.slots[t].active, c.slots[t].active);
    EXPECT_EQ(a.slots[t].deadline_s, c.slots[t].deadline_s);
  }
  EXPECT_NE(episode_csv(a), episode_csv(d));
}

TEST(Episode, SharedForecastTraceChangesNothing) {
  const auto cfg = small_config();
  const auto activity = activity_probabilities(cfg, 6);
  const auto seed = episode_seed(cfg.seed, 6, 0);
  const auto trace = forecast_channel_trace(cfg, 6, seed);
  EpisodeHooks hooks;
  hooks.channel_forecasts = &trace;
  for (PolicyTag p : {PolicyTag::kAegis, PolicyTag::kAegisNoBudget})
    EXPECT_EQ(episode_csv(run_episode(cfg, activity, p, seed, hooks)),
              episode_csv(run_episode(cfg, activity, p, seed)));
}

TEST(Episode, LogsAreConsistent) {
  for (bool exempt : {false, true}) {
    auto cfg = small_config();
    cfg.scenario.exempt_rejected = exempt;
    const auto activity = activity_probabilities(cfg, 6);
    const auto sys = build_system(cfg.scenario, activity);
    for (PolicyTag p : kAllPolicies) {
      const auto log = run_episode(cfg, activity, p, episode_seed(cfg.seed, 6, 0));
      ASSERT_EQ(log.slots.size(), 25u);
      EXPECT_TRUE(audit_episode_log(log, sys, enforces_budget(p)).empty()) << to_string(p);
      for (const auto& r : log.slots) {
        EXPECT_LE(r.iterations, cfg.scenario.game.max_iterations);
        for (std::size_t i = 0; i < 6; ++i) {
          EXPECT_EQ(r.timely[i], timely_indicator(r.realized_delay[i], r.deadline_s[i]) && r.active[i]);
          if (r.active[i] && r.actions[i].is_null()) {
            EXPECT_EQ(r.predicted_risk[i], 1.0);
          }
        }
      }
    }
  }
}

TEST(Episode, InactiveUsersNeverServed) {
  auto cfg = small_config();
  cfg.scenario.activity.range = {0.0, 0.0};
  const auto log = run_episode(cfg, 6, PolicyTag::kAegis, 0);
  for (const auto& r : log.slots)
    for (const auto& a : r.actions) EXPECT_TRUE(a.is_null());
  const auto tir = metric_tir(log);
  EXPECT_EQ(tir.value, 1.0);
  EXPECT_FALSE(tir.defined);
}

TEST(Sweep, RowCountAndOutputs) {
  auto cfg = small_config();
  cfg.horizon = 10;
  cfg.users = {3, 4};
  cfg.policies = {PolicyTag::kAegisNoPred, PolicyTag::kEqualShare, PolicyTag::kDeadlineFirst};
  const auto rows = run_sweep(cfg);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].policy, "AEGISNoPred");
  EXPECT_EQ(rows[0].n_users, 3);
  EXPECT_EQ(rows[0].episodes, 2);

  const auto dir = std::filesystem::temp_directory_path() / "aegis_sweep_test";
  std::filesystem::remove_all(dir);
  emit_outputs(rows, cfg, dir / "a");
  emit_outputs(run_sweep(cfg), cfg, dir / "b");
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  for (const char* f : {"metrics.csv", "fig2a_tir.csv", "fig3c_cr.csv", "manifest.json"})
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  EXPECT_NE(slurp(dir / "a" / "manifest.json").find("config_hash"), std::string::npos);

  emit_outputs({}, cfg, dir / "empty");
  EXPECT_EQ(slurp(dir / "empty" / "metrics.csv"), std::string(kMetricsHeader) + "\n");
  std::filesystem::remove_all(dir);
}

TEST(Sweep, SinglePoint) {
  auto cfg = small_config();
  cfg.horizon = 5;
  cfg.episodes = 1;
  cfg.policies = {PolicyTag::kBclf};
  EXPECT_EQ(run_sweep(cfg).size(), 1u);
}

TEST(Output, NumberFormatting) {
  EXPECT_EQ(format_number(0.25), "0.25");
  EXPECT_EQ(format_number(kInfinity), "inf");
  EXPECT_EQ(metrics_csv_line(MetricsRow{"X", 3, 1, {1, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}, {2, 0}}),
            "X,3,1,1,0,0,0,0,0,0,0,0,0,2,0");
}

}  // namespace
}  // namespace aegis
