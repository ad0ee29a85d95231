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

#ifndef AEGIS_LSTM_HPP
#define AEGIS_LSTM_HPP

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aegis {

/// Single-layer LSTM with scalar input and a linear readout.
///
/// All weights live in one flat vector `theta` so gradient steps and finite
/// differences are plain vector ops. Gate order inside every block is
/// input, forget, output, candidate.
///
/// With `residual` set the readout predicts the change from the last window
/// value, so an all-zero readout reproduces the last observation.
struct LstmParams {
  int hidden = 16;
  bool residual = false;
  double norm_mean = 0.0;
  double norm_scale = 1.0;
  std::vector<double> theta;

  static std::size_t parameter_count(int h) {
    const auto n = static_cast<std::size_t>(h);
    return 4 * n + 4 * n * n + 4 * n + n + 1;
  }

  explicit LstmParams(int hidden_size = 16, bool residual_readout = false)
      : hidden(hidden_size), residual(residual_readout), theta(parameter_count(hidden_size), 0.0) {
    if (hidden_size < 1) throw std::invalid_argument("hidden size must be positive");
  }

  std::size_t h() const { return static_cast<std::size_t>(hidden); }
  // Offsets into theta.
  std::size_t wx() const { return 0; }
  std::size_t wh() const { return 4 * h(); }
  std::size_t bias() const { return 4 * h() + 4 * h() * h(); }
  std::size_t readout_w() const { return bias() + 4 * h(); }
  std::size_t readout_b() const { return readout_w() + h(); }

  double& readout_bias() { return theta[readout_b()]; }
  double readout_bias() const { return theta[readout_b()]; }

  void validate() const {
    if (theta.size() != parameter_count(hidden)) throw std::invalid_argument("theta has wrong size");
    if (!(norm_scale > 0.0)) throw std::invalid_argument("normalization scale must be positive");
  }

  /// Uniform(-1/sqrt(h), 1/sqrt(h)) gate weights, forget bias 1, zero readout.
  static LstmParams initialized(int hidden_size, bool residual_readout, std::uint64_t seed) {
    LstmParams p(hidden_size, residual_readout);
    std::mt19937_64 rng(seed);
    const double r = 1.0 / std::sqrt(static_cast<double>(hidden_size));
    std::uniform_real_distribution<double> u(-r, r);
    for (std::size_t k = 0; k < p.bias(); ++k) p.theta[k] = u(rng);
    for (std::size_t j = 0; j < p.h(); ++j) p.theta[p.bias() + p.h() + j] = 1.0;
    if (!residual_readout)
      for (std::size_t j = 0; j < p.h(); ++j) p.theta[p.readout_w() + j] = u(rng);
    return p;
  }
};

struct LstmState {
  std::vector<double> hidden;
  std::vector<double> cell;

  explicit LstmState(std::size_t h = 0) : hidden(h, 0.0), cell(h, 0.0) {}
};

namespace detail {

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Activations of one step, kept for backpropagation.
struct StepCache {
  double x = 0.0;
  std::vector<double> h_prev, c_prev, i, f, o, g, c, tanh_c, h;
};

inline void cell_forward(const LstmParams& p, double x, const std::vector<double>& h_prev,
                         const std::vector<double>& c_prev, StepCache& out) {
  const std::size_t n = p.h();
  const double* th = p.theta.data();
  out.x = x;
  out.h_prev = h_prev;
  out.c_prev = c_prev;
  out.i.resize(n); out.f.resize(n); out.o.resize(n); out.g.resize(n);
  out.c.resize(n); out.tanh_c.resize(n); out.h.resize(n);
  for (std::size_t gate = 0; gate < 4; ++gate) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = gate * n + j;
      double z = th[p.wx() + row] * x + th[p.bias() + row];
      const double* w = th + p.wh() + row * n;
      for (std::size_t m = 0; m < n; ++m) z += w[m] * h_prev[m];
      switch (gate) {
        case 0: out.i[j] = sigmoid(z); break;
        case 1: out.f[j] = sigmoid(z); break;
        case 2: out.o[j] = sigmoid(z); break;
        default: out.g[j] = std::tanh(z); break;
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    out.c[j] = out.f[j] * c_prev[j] + out.i[j] * out.g[j];
    out.tanh_c[j] = std::tanh(out.c[j]);
    out.h[j] = out.o[j] * out.tanh_c[j];
  }
}

inline double normalize(const LstmParams& p, double v) { return (v - p.norm_mean) / p.norm_scale; }
inline double denormalize(const LstmParams& p, double v) { return v * p.norm_scale + p.norm_mean; }

// Normalized-space output for a window; fills `caches` when given.
inline double forward_normalized(const LstmParams& p, std::span<const double> window,
                                 std::vector<StepCache>* caches) {
  const std::size_t n = p.h();
  std::vector<double> h(n, 0.0), c(n, 0.0);
  StepCache local;
  if (caches) caches->resize(window.size());
  for (std::size_t t = 0; t < window.size(); ++t) {
    StepCache& step = caches ? (*caches)[t] : local;
    cell_forward(p, normalize(p, window[t]), h, c, step);
    h = step.h;
    c = step.c;
  }
  double y = p.theta[p.readout_b()];
  for (std::size_t j = 0; j < n; ++j) y += p.theta[p.readout_w() + j] * h[j];
  if (p.residual && !window.empty()) y += normalize(p, window.back());
  return y;
}

}  // namespace detail

/// One LSTM cell update from `state` with scalar input x.
inline LstmState lstm_cell_step(const LstmParams& params, double x, const LstmState& state) {
  if (!std::isfinite(x)) throw std::domain_error("non-finite LSTM input");
  if (state.hidden.size() != params.h() || state.cell.size() != params.h())
    throw std::invalid_argument("LSTM state has wrong dimension");
  detail::StepCache step;
  detail::cell_forward(params, x, state.hidden, state.cell, step);
  LstmState next;
  next.hidden = std::move(step.h);
  next.cell = std::move(step.c);
  return next;
}

/// Runs the window from a zero state and returns the de-normalized readout.
inline double forward_window(const LstmParams& params, std::span<const double> window) {
  if (window.empty()) throw std::invalid_argument("empty window");
  for (double v : window)
    if (!std::isfinite(v)) throw std::domain_error("non-finite value in window");
  return detail::denormalize(params, detail::forward_normalized(params, window, nullptr));
}

struct TrainingSample {
  std::vector<double> window;
  double target = 0.0;
};

/// Mean squared error in normalized space.
inline double mse_loss(const LstmParams& params, std::span<const TrainingSample> batch) {
  double loss = 0.0;
  for (const auto& s : batch) {
    const double e = detail::forward_normalized(params, s.window, nullptr) -
                     detail::normalize(params, s.target);
    loss += e * e;
  }
  return loss / static_cast<double>(batch.size());
}

/// Gradient of mse_loss with respect to theta via backpropagation through time.
inline std::vector<double> loss_gradient(const LstmParams& p, std::span<const TrainingSample> batch) {
  const std::size_t n = p.h();
  const double* th = p.theta.data();
  std::vector<double> grad(p.theta.size(), 0.0);
  std::vector<detail::StepCache> caches;
  std::vector<double> dh(n), dc(n), dz(4 * n), dh_prev(n);
  const double inv = 1.0 / static_cast<double>(batch.size());

  for (const auto& sample : batch) {
    const double y = detail::forward_normalized(p, sample.window, &caches);
    const double dy = 2.0 * (y - detail::normalize(p, sample.target)) * inv;
    const auto& last = caches.back().h;
    for (std::size_t j = 0; j < n; ++j) {
      grad[p.readout_w() + j] += dy * last[j];
      dh[j] = dy * th[p.readout_w() + j];
      dc[j] = 0.0;
    }
    grad[p.readout_b()] += dy;

    for (std::size_t t = caches.size(); t-- > 0;) {
      const auto& s = caches[t];
      for (std::size_t j = 0; j < n; ++j) {
        const double do_ = dh[j] * s.tanh_c[j];
        dc[j] += dh[j] * s.o[j] * (1.0 - s.tanh_c[j] * s.tanh_c[j]);
        const double di = dc[j] * s.g[j];
        const double dg = dc[j] * s.i[j];
        const double df = dc[j] * s.c_prev[j];
        dz[j] = di * s.i[j] * (1.0 - s.i[j]);
        dz[n + j] = df * s.f[j] * (1.0 - s.f[j]);
        dz[2 * n + j] = do_ * s.o[j] * (1.0 - s.o[j]);
        dz[3 * n + j] = dg * (1.0 - s.g[j] * s.g[j]);
        dc[j] *= s.f[j];
      }
      std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
      for (std::size_t row = 0; row < 4 * n; ++row) {
        const double d = dz[row];
        grad[p.wx() + row] += d * s.x;
        grad[p.bias() + row] += d;
        double* gw = grad.data() + p.wh() + row * n;
        const double* w = th + p.wh() + row * n;
        for (std::size_t m = 0; m < n; ++m) {
          gw[m] += d * s.h_prev[m];
          dh_prev[m] += d * w[m];
        }
      }
      dh.swap(dh_prev);
    }
  }
  return grad;
}

struct TrainResult {
  double loss = 0.0;  // after the update
  double grad_norm = 0.0;
  bool clipped = false;
};

/// One gradient-descent step with global-norm clipping.
inline TrainResult train_step(LstmParams& params, std::span<const TrainingSample> batch,
                              double learning_rate, double clip_norm = 5.0) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  TrainResult r;
  auto grad = loss_gradient(params, batch);
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  r.grad_norm = std::sqrt(sq);
  double scale = 1.0;
  if (r.grad_norm > clip_norm) {
    scale = clip_norm / r.grad_norm;
    r.clipped = true;
  }
  if (learning_rate != 0.0)
    for (std::size_t k = 0; k < grad.size(); ++k) params.theta[k] -= learning_rate * scale * grad[k];
  r.loss = mse_loss(params, batch);
  if (!std::isfinite(r.loss)) throw std::domain_error("LSTM training produced a non-finite loss");
  return r;
}

// ---------------------------------------------------------------------------
// Parameter dump
//
//   AEGIS-LSTM 1
//   hidden <h>
//   residual <0|1>
//   norm <mean> <scale>
//   theta <count>
//   <count whitespace-separated values>

inline void save_params(std::ostream& out, const LstmParams& p) {
  const auto old = out.precision(17);
  out << "AEGIS-LSTM 1\n"
      << "hidden " << p.hidden << "\n"
      << "residual " << (p.residual ? 1 : 0) << "\n"
      << "norm " << p.norm_mean << " " << p.norm_scale << "\n"
      << "theta " << p.theta.size() << "\n";
  for (std::size_t k = 0; k < p.theta.size(); ++k)
    out << p.theta[k] << ((k + 1) % 8 == 0 || k + 1 == p.theta.size() ? '\n' : ' ');
  out.precision(old);
}

inline LstmParams load_params(std::istream& in) {
  auto expect = [&](const char* key) {
    std::string word;
    if (!(in >> word) || word != key)
      throw std::runtime_error(std::string("LSTM dump: expected '") + key + "'");
  };
  expect("AEGIS-LSTM");
  int version = 0;
  if (!(in >> version) || version != 1) throw std::runtime_error("LSTM dump: unsupported version");
  int hidden = 0, residual = 0;
  double mean = 0.0, scale = 0.0;
  std::size_t count = 0;
  expect("hidden");
  in >> hidden;
  expect("residual");
  in >> residual;
  expect("norm");
  in >> mean >> scale;
  expect("theta");
  in >> count;
  if (!in || hidden < 1) throw std::runtime_error("LSTM dump: malformed header");
  LstmParams p(hidden, residual != 0);
  if (count != p.theta.size()) throw std::runtime_error("LSTM dump: parameter count mismatch");
  for (auto& v : p.theta)
    if (!(in >> v)) throw std::runtime_error("LSTM dump: truncated parameters");
  p.norm_mean = mean;
  p.norm_scale = scale;
  p.validate();
  return p;
}

}  // namespace aegis

#endif  // AEGIS_LSTM_HPP
