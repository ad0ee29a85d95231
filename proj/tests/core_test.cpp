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

#include "aegis/core.hpp"

namespace aegis {
namespace {

TEST(ActionGrid, UniformLevels) {
  ResourcePools pools;
  const auto grid = make_action_grid(pools, 5, 5);
  ASSERT_EQ(grid.bandwidth_levels.size(), 5u);
  const double expect[] = {10e6, 20e6, 30e6, 40e6, 50e6};
  for (std::size_t k = 0; k < 5; ++k) EXPECT_DOUBLE_EQ(grid.bandwidth_levels[k], expect[k]);
  EXPECT_DOUBLE_EQ(grid.compute_levels[0], 31e9);
  EXPECT_EQ(grid.bandwidth_levels.back(), pools.total_bandwidth_hz);
  EXPECT_EQ(grid.compute_levels.back(), pools.total_compute_hz);
  EXPECT_NO_THROW(grid.validate(pools));
}

TEST(ActionGrid, SingleLevel) {
  ResourcePools pools;
  const auto grid = make_action_grid(pools, 1, 1);
  ASSERT_EQ(grid.size(), 1u);
  EXPECT_EQ(grid.at(0, 0), (Action{pools.total_bandwidth_hz, pools.total_compute_hz}));
}

TEST(ActionGrid, ZeroLevelsRejected) {
  ResourcePools pools;
  EXPECT_THROW(make_action_grid(pools, 0, 8), ConfigError);
  EXPECT_THROW(make_action_grid(pools, 8, 0), ConfigError);
}

TEST(ActionGrid, Membership) {
  ResourcePools pools;
  const auto grid = make_action_grid(pools, 5, 5);
  EXPECT_TRUE(validate_action(Action::null(), grid));
  EXPECT_FALSE(validate_action({10e6, 0.0}, grid));
  EXPECT_TRUE(validate_action({10e6, 31e9}, grid));
  EXPECT_FALSE(validate_action({15e6, 31e9}, grid));
  EXPECT_FALSE(validate_action({10e6, 30e9}, grid));
}

TEST(ActionGrid, ValidateRejectsBadLevels) {
  ResourcePools pools;
  ActionGrid g{{10e6, 5e6}, {1e9}};
  EXPECT_THROW(g.validate(pools), ConfigError);
  g = {{10e6, 60e6}, {1e9}};
  EXPECT_THROW(g.validate(pools), ConfigError);
  g = {{}, {1e9}};
  EXPECT_THROW(g.validate(pools), ConfigError);
}

TEST(Action, NullConventions) {
  EXPECT_TRUE(Action::null().is_null());
  EXPECT_TRUE(Action::null().is_well_formed());
  EXPECT_FALSE((Action{1.0, 0.0}).is_well_formed());
  EXPECT_TRUE((Action{1.0, 2.0}).is_well_formed());
}

TEST(UserProfile, Validation) {
  UserProfile u;
  EXPECT_NO_THROW(u.validate());
  u.weight = 0.0;
  EXPECT_THROW(u.validate(), ConfigError);
  u = {};
  u.activity_prob = 1.5;
  EXPECT_THROW(u.validate(), ConfigError);
  u = {};
  u.budget_cap = 0.0;
  EXPECT_THROW(u.validate(), ConfigError);
  u = {};
  u.cost_compute = -1.0;
  EXPECT_THROW(u.validate(), ConfigError);
}

TEST(SlotState, Validation) {
  SystemModel sys;
  sys.grid = make_action_grid(sys.pools, 2, 2);
  sys.users.resize(2);
  SlotState s;
  s.active = {1, 0};
  s.tasks = {TaskSpec{1e6, 1e9, 0.5, 1.0}, std::nullopt};
  s.observed_channel = s.predicted_channel = {1e-10, 1e-10};
  s.budgets = {1.0, 0.5};
  EXPECT_NO_THROW(s.validate(sys));
  auto bad = s;
  bad.tasks[1] = TaskSpec{1e6, 1e9, 0.5, 1.0};
  EXPECT_THROW(bad.validate(sys), InvariantError);
  bad = s;
  bad.budgets[0] = 1.5;
  EXPECT_THROW(bad.validate(sys), InvariantError);
  bad = s;
  bad.predicted_backlog = -1.0;
  EXPECT_THROW(bad.validate(sys), InvariantError);
  bad = s;
  bad.slot = 0;
  EXPECT_THROW(bad.validate(sys), InvariantError);
}

}  // namespace
}  // namespace aegis
