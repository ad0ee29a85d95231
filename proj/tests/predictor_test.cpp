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

#include <random>

#include "aegis/predictor.hpp"

namespace aegis {
namespace {

TEST(LastObservation, Basics) {
  EXPECT_EQ(last_observation(std::vector<double>{5.0}), 5.0);
  EXPECT_EQ(last_observation(std::vector<double>{1.0, 2.0, 3.0}), 3.0);
  EXPECT_THROW(last_observation(std::vector<double>{}), std::invalid_argument);
}

TEST(SeriesPredictor, ColdStartFallsBackToLastObservation) {
  SeriesPredictor p(PredictorConfig{}, 1);
  EXPECT_THROW(p.last(), std::logic_error);
  for (double v : {3.0, 4.0, 2.5}) {
    p.observe(v);
    EXPECT_EQ(p.predict(), v);
  }
  EXPECT_FALSE(p.warm());
}

TEST(SeriesPredictor, FreshResidualModelRepeatsLastValue) {
  PredictorConfig cfg;
  cfg.learning_rate = 0.0;
  SeriesPredictor p(cfg, 2);
  for (int k = 0; k < 12; ++k) p.observe(-90.0 - k);
  EXPECT_TRUE(p.warm());
  EXPECT_NEAR(p.predict(), -101.0, 1e-9);
}

TEST(SeriesPredictor, RejectsNonFinite) {
  SeriesPredictor p(PredictorConfig{}, 3);
  EXPECT_THROW(p.observe(std::nan("")), std::domain_error);
}

TEST(PredictorBank, ClampsForecasts) {
  PredictorConfig cfg;
  PredictorBank bank(2, cfg, 5);
  bank.observe(std::vector<double>{1e-10, 2e-9}, 0.0);
  // Force a negative backlog forecast through the readout bias of a warm model.
  for (int k = 0; k < cfg.window; ++k) bank.observe(std::vector<double>{1e-10, 2e-9}, 0.0);
  auto params = bank.load.params();
  params.readout_bias() = -5.0;
  bank.load.set_params(params);
  const auto f = predict_states(bank);
  EXPECT_EQ(f.backlog, 0.0);
  for (double g : f.channel) EXPECT_GT(g, 0.0);
}

TEST(ObservationHistory, LatestValues) {
  ObservationHistory h(2);
  h.observe(std::vector<double>{1.0, 2.0}, 7.0);
  h.observe(std::vector<double>{3.0, 4.0}, 9.0);
  const auto f = last_observation_predict(h);
  EXPECT_EQ(f.channel, (std::vector<double>{3.0, 4.0}));
  EXPECT_EQ(f.backlog, 9.0);
}

TEST(SeriesPredictor, BeatsLastObservationOnAr1) {
  // Train online for 180 slots, then score on a held-out continuation.
  std::normal_distribution<double> n01;
  double lstm = 0.0, naive = 0.0;
  for (int series = 0; series < 5; ++series) {
    Rng rng(100 + series);
    SeriesPredictor p(PredictorConfig{}, 200 + series);
    const double mu = -95.0;
    double x = mu;
    for (int t = 0; t < 180; ++t) {
      p.observe(x);
      x = mu + 0.9 * (x - mu) + 2.0 * n01(rng);
    }
    std::vector<double> w;
    for (int t = 0; t < 8; ++t) {
      w.push_back(x);
      x = mu + 0.9 * (x - mu) + 2.0 * n01(rng);
    }
    for (int t = 0; t < 1000; ++t) {
      const double e1 = forward_window(p.params(), w) - x;
      const double e2 = w.back() - x;
      lstm += e1 * e1;
      naive += e2 * e2;
      w.erase(w.begin());
      w.push_back(x);
      x = mu + 0.9 * (x - mu) + 2.0 * n01(rng);
    }
  }
  EXPECT_LE(lstm, naive);
}

}  // namespace
}  // namespace aegis
