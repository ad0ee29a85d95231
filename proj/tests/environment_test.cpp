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

#include <fstream>
#include <numeric>
#include <sstream>

#include "aegis/environment.hpp"

namespace aegis {
namespace {

std::vector<double> load_fixture(std::size_t n) {
  std::ifstream in(std::string(AEGIS_TEST_DATA) + "/activity.csv");
  return load_activity_probabilities(in, n, 31);
}

TEST(Activity, TraceFixture) {
  // taxi_a: every day in area 77; taxi_b: 12 distinct days there (duplicates and
  // other areas ignored); taxi_c: never in area 77.
  const auto p = load_fixture(3);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[0], 1.0);
  EXPECT_DOUBLE_EQ(p[1], 12.0 / 31.0);
  EXPECT_NEAR(p[1], 0.3871, 1e-4);
  EXPECT_EQ(p[2], 0.0);
}

TEST(Activity, TooFewVehicles) { EXPECT_THROW(load_fixture(4), ConfigError); }

TEST(Activity, MalformedRows) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return load_activity_probabilities(in, 1, 31);
  };
  EXPECT_THROW(parse("id,when,where\n"), ParseError);
  try {
    parse("vehicle_id,date,community_area\nv1,2016-01-01,77\nv1,2016-01-02\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row, 3u);
  }
  EXPECT_THROW(parse("vehicle_id,date,community_area\nv1,01/02/2016,77\n"), ParseError);
  EXPECT_THROW(parse("vehicle_id,date,community_area\nv1,2016-01-02,7x\n"), ParseError);
  EXPECT_EQ(parse("vehicle_id,date,community_area\r\nv1,2016-01-02,77\r\n")[0], 1.0 / 31.0);
}

TEST(Activity, Synthesized) {
  const auto a = synthesize_activity_probabilities(200, 42);
  EXPECT_EQ(a, synthesize_activity_probabilities(200, 42));
  for (double p : a) {
    EXPECT_GE(p, 0.2);
    EXPECT_LE(p, 0.9);
  }
  for (double p : synthesize_activity_probabilities(5, 1, {0.5, 0.5})) EXPECT_EQ(p, 0.5);
}

TEST(Activity, BernoulliDraws) {
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const auto chi = draw_activation({0.0, 1.0}, rng);
    EXPECT_EQ(chi[0], 0);
    EXPECT_EQ(chi[1], 1);
  }
  std::size_t ones = 0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) ones += draw_activation({0.3}, rng)[0];
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.3, 0.01);
}

TEST(Tasks, RangesAndMean) {
  const TaskDistribution dist;
  Rng rng(9);
  double sum_mb = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const auto t = draw_task(dist, rng);
    const double mb = t.data_bits / kBitsPerMegabyte;
    EXPECT_GE(mb, 0.12);
    EXPECT_LE(mb, 0.90);
    EXPECT_GE(t.workload_cycles, 0.08e9);
    EXPECT_LE(t.workload_cycles, 0.95e9);
    EXPECT_GE(t.deadline_s, 0.28);
    EXPECT_LE(t.deadline_s, 0.82);
    sum_mb += mb;
  }
  EXPECT_NEAR(sum_mb / n, (0.12 + 0.90) / 2.0, 0.01);
}

TEST(Tasks, CollapsedIntervals) {
  TaskDistribution dist{{0.5, 0.5}, {0.3, 0.3}, {0.4, 0.4}};
  Rng rng(1);
  const auto t = draw_task(dist, rng);
  EXPECT_EQ(t.data_bits, 4194304.0);
  EXPECT_EQ(t.workload_cycles, 0.3e9);
  EXPECT_EQ(t.deadline_s, 0.4);
}

TEST(Channel, NoiselessFixedPoint) {
  ChannelProcess proc{{-95.0}, 0.9, 0.0, {-95.0}};
  Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    const auto g = step_channel(proc, rng);
    EXPECT_EQ(proc.state_db[0], -95.0);
    EXPECT_DOUBLE_EQ(g[0], std::pow(10.0, -9.5));
  }
}

TEST(Channel, StationaryVariance) {
  ChannelDistribution dist{{-95.0, -95.0}, 0.9, 2.0};
  Rng rng(17);
  auto proc = make_channel_process(1, dist, rng);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    step_channel(proc, rng);
    const double x = proc.state_db[0] + 95.0;
    s += x;
    s2 += x * x;
  }
  const double var = s2 / n - (s / n) * (s / n);
  const double expect = 4.0 / (1.0 - 0.81);
  EXPECT_NEAR(var, expect, 0.05 * expect);
}

TEST(Channel, Sinr) {
  RadioParams radio;
  EXPECT_DOUBLE_EQ(compute_sinr(radio.noise_power_w / radio.tx_power_w, radio), 1.0);
  EXPECT_DOUBLE_EQ(compute_sinr(1e-10, radio), 200.0);
  EXPECT_DOUBLE_EQ(compute_sinr(2e-10, radio), 2.0 * compute_sinr(1e-10, radio));
}

TEST(Backlog, Law) {
  ResourcePools pools;
  EXPECT_EQ(next_backlog(1e10, 0.0, 0.0, pools), 0.0);
  EXPECT_EQ(next_backlog(1e10, 3e9, pools.total_compute_hz, pools), 1.3e10);
  EXPECT_DOUBLE_EQ(next_backlog(1e11, 5e10, 100e9, pools), 9.5e10);
}

TEST(Backlog, StepUsesProfileCompute) {
  ResourcePools pools;
  BacklogProcess proc{2e10, 0.0};
  Rng rng(1);
  const JointActions profile{{1e6, 100e9}, {1e6, 50e9}};
  EXPECT_EQ(step_backlog(proc, profile, pools, rng), 1.5e10);
  EXPECT_EQ(proc.backlog_cycles, 1.5e10);
}

TEST(Seeds, DerivedStreamsDiffer) {
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(1, 2, 0), derive_seed(1, 2, 1));
  EXPECT_EQ(derive_seed(5, 6, 7), derive_seed(5, 6, 7));
}

}  // namespace
}  // namespace aegis
