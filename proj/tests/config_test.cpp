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

#include "aegis/config.hpp"

namespace aegis {
namespace {

TEST(Config, DefaultsAndUnits) {
  const auto c = config_from_json(Json::object());
  EXPECT_EQ(c.horizon, 180);
  EXPECT_EQ(c.episodes, 20);
  EXPECT_EQ(c.users, (std::vector<int>{10, 20, 30, 40}));
  EXPECT_EQ(c.policies.size(), 7u);
  EXPECT_EQ(c.scenario.pools.total_bandwidth_hz, 50e6);
  EXPECT_EQ(c.scenario.pools.total_compute_hz, 155e9);
  EXPECT_FALSE(c.scenario.exempt_rejected);
  const auto sys = build_system(c.scenario, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(sys.users[0].cost_bandwidth, 0.1 / 50e6);
  EXPECT_DOUBLE_EQ(sys.users[0].cost_compute, 0.1 / 155e9);
  EXPECT_EQ(sys.grid.bandwidth_levels.size(), 8u);
}

TEST(Config, ParsesSectionsAndOverrides) {
  const auto j = Json::parse(R"({
    "seed": 9, "horizon": 30, "users": [5], "policies": ["AEGIS", "BCLF"],
    "pools": {"total_bandwidth_mhz": 20, "total_compute_ghz": 40},
    "grid": {"bandwidth_levels": 4, "compute_levels": 2},
    "users_default": {"budget_cap": 0.8},
    "user_overrides": [{"id": 1, "weight": 2.0, "compute_cost": 0.4}],
    "tasks": {"deadline_s": [0.5, 0.6]},
    "game": {"selection": "round-robin", "threshold": 0},
    "budget": {"exempt_rejected": true}
  })");
  const auto c = config_from_json(j);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.policies, (std::vector<PolicyTag>{PolicyTag::kAegis, PolicyTag::kBclf}));
  EXPECT_EQ(c.scenario.game.rule, SelectionRule::kRoundRobin);
  EXPECT_EQ(c.scenario.game.threshold, 0.0);
  EXPECT_TRUE(c.scenario.exempt_rejected);
  const auto sys = build_system(c.scenario, {0.1, 0.2});
  EXPECT_EQ(sys.pools.total_compute_hz, 40e9);
  EXPECT_EQ(sys.grid.compute_levels, (std::vector<double>{20e9, 40e9}));
  EXPECT_EQ(sys.users[0].weight, 1.0);
  EXPECT_EQ(sys.users[1].weight, 2.0);
  EXPECT_DOUBLE_EQ(sys.users[1].cost_compute, 0.4 / 40e9);
  EXPECT_EQ(sys.users[1].budget_cap, 0.8);
  EXPECT_EQ(c.scenario.tasks.deadline_s.lo, 0.5);
}

TEST(Config, RejectsInvalid) {
  EXPECT_THROW(config_from_json(Json::parse(R"({"horizon": 0})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"grid": {"compute_levels": 0}})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"policies": ["Oracle"]})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"horizon": "long"})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"pools": 3})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"([1, 2])")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"channel": {"ar_coeff": 1.0}})")), ConfigError);
}

TEST(Config, RoundTripAndHash) {
  auto c = config_from_json(Json::parse(R"({"seed": 3, "users": [10, 20]})"));
  const auto back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back).dump(), config_to_json(c).dump());
  EXPECT_EQ(config_hash(back), config_hash(c));
  auto d = c;
  d.scenario.user_defaults.recovery_rate = 0.06;
  EXPECT_NE(config_hash(d), config_hash(c));
  d = c;
  d.scenario.game.max_iterations = 199;
  EXPECT_NE(config_hash(d), config_hash(c));
}

}  // namespace
}  // namespace aegis
