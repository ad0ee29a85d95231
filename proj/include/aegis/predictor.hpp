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

#ifndef AEGIS_PREDICTOR_HPP
#define AEGIS_PREDICTOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "aegis/core.hpp"
#include "aegis/environment.hpp"
#include "aegis/lstm.hpp"

namespace aegis {

struct PredictorConfig {
  int window = 8;
  int hidden = 16;
  double learning_rate = 1e-2;
  double clip_norm = 5.0;
  int batch = 16;  // most recent (window -> next) samples per training step
  bool residual = true;

  void validate() const {
    if (window < 1 || hidden < 1 || batch < 1) throw ConfigError("predictor sizes must be positive");
    if (!(learning_rate >= 0.0 && clip_norm > 0.0))
      throw ConfigError("predictor learning rate / clip invalid");
  }
};

/// Online one-step-ahead forecaster for one scalar series.
///
/// Each observe() appends the value, refreshes running normalization
/// statistics and, once a full window plus target exist, takes one gradient
/// step on the newest `batch` samples. predict() falls back to the last
/// observation until `window` values have been seen.
class SeriesPredictor {
 public:
  SeriesPredictor(const PredictorConfig& cfg, std::uint64_t seed)
      : cfg_(cfg), params_(LstmParams::initialized(cfg.hidden, cfg.residual, seed)) {
    cfg_.validate();
  }

  void observe(double value) {
    if (!std::isfinite(value)) throw std::domain_error("non-finite observation");
    history_.push_back(value);
    const std::size_t keep = static_cast<std::size_t>(cfg_.window + cfg_.batch);
    while (history_.size() > keep) history_.pop_front();
    ++count_;
    const double delta = value - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (value - mean_);
    params_.norm_mean = mean_;
    params_.norm_scale = scale();
    if (cfg_.learning_rate > 0.0) train();
  }

  bool warm() const { return history_.size() >= static_cast<std::size_t>(cfg_.window); }
  bool empty() const { return history_.empty(); }
  double last() const {
    if (history_.empty()) throw std::logic_error("predictor has no observations");
    return history_.back();
  }

  double predict() const {
    if (!warm()) return last();
    std::vector<double> window(history_.end() - cfg_.window, history_.end());
    return forward_window(params_, window);
  }

  double last_loss() const { return last_loss_; }
  std::size_t clipped_steps() const { return clipped_; }
  const LstmParams& params() const { return params_; }
  void set_params(const LstmParams& p) {
    if (p.hidden != cfg_.hidden) throw std::invalid_argument("hidden size mismatch");
    params_ = p;
  }

 private:
  double scale() const {
    if (count_ < 2) return 1.0;
    const double sd = std::sqrt(m2_ / static_cast<double>(count_ - 1));
    return sd > 1e-12 ? sd : 1.0;
  }

  void train() {
    const std::size_t w = static_cast<std::size_t>(cfg_.window);
    if (history_.size() < w + 1) return;
    const std::size_t available = history_.size() - w;
    const std::size_t n = std::min<std::size_t>(available, static_cast<std::size_t>(cfg_.batch));
    batch_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t start = history_.size() - w - n + k;
      batch_[k].window.assign(history_.begin() + static_cast<std::ptrdiff_t>(start),
                              history_.begin() + static_cast<std::ptrdiff_t>(start + w));
      batch_[k].target = history_[start + w];
    }
    const auto r = train_step(params_, batch_, cfg_.learning_rate, cfg_.clip_norm);
    last_loss_ = r.loss;
    if (r.clipped) ++clipped_;
  }

  PredictorConfig cfg_;
  LstmParams params_;
  std::deque<double> history_;
  std::vector<TrainingSample> batch_;
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double last_loss_ = 0.0;
  std::size_t clipped_ = 0;
};

/// Forecast of the slot-t operating state.
struct StateForecast {
  std::vector<double> channel;  // linear gains, > 0
  double backlog = 0.0;         // cycles, >= 0
};

/// Per-user channel predictors (dB domain) and one shared edge-load predictor.
struct PredictorBank {
  std::vector<SeriesPredictor> channel;
  SeriesPredictor load;

  PredictorBank(std::size_t n_users, const PredictorConfig& cfg, std::uint64_t seed)
      : load(cfg, load_seed(seed)) {
    channel.reserve(n_users);
    for (std::size_t i = 0; i < n_users; ++i) channel.emplace_back(cfg, derive_seed(seed, 0xc4a, i));
  }

  static std::uint64_t load_seed(std::uint64_t seed) { return derive_seed(seed, 0x10ad); }

  void observe(std::span<const double> gains, double backlog) {
    for (std::size_t i = 0; i < channel.size(); ++i)
      channel[i].observe(ChannelProcess::linear_to_db(gains[i]));
    load.observe(backlog);
  }
};

/// Linear-gain channel forecasts, floored at the smallest positive double.
inline std::vector<double> predict_channels(const PredictorBank& bank) {
  std::vector<double> out(bank.channel.size());
  for (std::size_t i = 0; i < bank.channel.size(); ++i) {
    const double g = ChannelProcess::db_to_linear(bank.channel[i].predict());
    out[i] = std::max(g, std::numeric_limits<double>::min());
  }
  return out;
}

inline StateForecast predict_states(const PredictorBank& bank) {
  StateForecast f;
  f.channel = predict_channels(bank);
  f.backlog = std::max(0.0, bank.load.predict());
  return f;
}

/// Latest raw observations kept for the no-prediction path and the baselines.
struct ObservationHistory {
  std::vector<std::vector<double>> channel;  // per user, linear gains
  std::vector<double> backlog;

  explicit ObservationHistory(std::size_t n_users = 0) : channel(n_users) {}

  void observe(std::span<const double> gains, double backlog_cycles) {
    for (std::size_t i = 0; i < channel.size(); ++i) channel[i].push_back(gains[i]);
    backlog.push_back(backlog_cycles);
  }
};

inline double last_observation(std::span<const double> history) {
  if (history.empty()) throw std::invalid_argument("last-observation predictor needs a history");
  return history.back();
}

/// Most recent observations verbatim.
inline StateForecast last_observation_predict(const ObservationHistory& hist) {
  StateForecast f;
  f.channel.reserve(hist.channel.size());
  for (const auto& h : hist.channel) f.channel.push_back(last_observation(h));
  f.backlog = last_observation(hist.backlog);
  return f;
}

}  // namespace aegis

#endif  // AEGIS_PREDICTOR_HPP
