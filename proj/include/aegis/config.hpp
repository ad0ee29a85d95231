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

#ifndef AEGIS_CONFIG_HPP
#define AEGIS_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aegis/baselines.hpp"
#include "aegis/core.hpp"
#include "aegis/environment.hpp"
#include "aegis/game.hpp"
#include "aegis/predictor.hpp"

// JSON experiment configuration. Every key is optional; omitted keys keep the
// defaults below. Units at this boundary are MB, MHz, GHz, Gcycles and
// seconds; everything is converted to bits, Hz and cycles on ingestion.
//
//   seed, horizon, episodes, users [list], policies [list], output_dir
//   pools     { total_bandwidth_mhz, total_compute_ghz, slot_duration_s,
//               stability_eps, budget_eps }
//   grid      { bandwidth_levels, compute_levels }
//   users_default { weight, risk_sensitivity, budget_cap, recovery_rate,
//                   bandwidth_cost, compute_cost, risk_regularization }
//             bandwidth_cost / compute_cost are per unit of pool share,
//             i.e. alpha = bandwidth_cost / B_tot and beta = compute_cost / F_tot.
//   user_overrides [ { id, <any users_default key> } ]
//   activity  { trace, region, days_in_month, min, max }
//   tasks     { data_mb [lo,hi], workload_gcycles [lo,hi], deadline_s [lo,hi] }
//   channel   { mean_db [lo,hi], ar_coeff, sigma_db }
//   radio     { tx_power_w, noise_power_w }
//   backlog   { arrival_max_fraction, initial_gcycles }
//   predictor { window, hidden, learning_rate, clip_norm, batch, residual }
//   game      { threshold, max_iterations, selection }
//   budget    { exempt_rejected }
namespace aegis {

using Json = nlohmann::json;

struct UserDefaults {
  double weight = 1.0;
  double risk_sensitivity = 10.0;
  double budget_cap = 1.0;
  double recovery_rate = 0.05;
  double bandwidth_cost = 0.1;
  double compute_cost = 0.1;
  double risk_regularization = 0.5;
};

struct UserOverride {
  std::size_t id = 0;
  std::optional<double> weight, risk_sensitivity, budget_cap, recovery_rate, bandwidth_cost,
      compute_cost, risk_regularization;
};

struct ActivityConfig {
  std::string trace;  // empty: synthesize
  int region = 77;
  int days_in_month = 31;
  Interval range{0.2, 0.9};
};

struct BacklogConfig {
  double arrival_max_fraction = 0.3;  // of F_tot * tau
  double initial_gcycles = 0.0;
};

struct ScenarioConfig {
  ResourcePools pools;
  int bandwidth_levels = 8;
  int compute_levels = 8;
  UserDefaults user_defaults;
  std::vector<UserOverride> overrides;
  ActivityConfig activity;
  TaskDistribution tasks;
  ChannelDistribution channel;
  RadioParams radio;
  BacklogConfig backlog;
  PredictorConfig predictor;
  GameConfig game;
  bool exempt_rejected = false;

  void validate() const {
    pools.validate();
    if (bandwidth_levels < 1 || compute_levels < 1) throw ConfigError("grid level counts must be >= 1");
    tasks.validate();
    radio.validate();
    predictor.validate();
    game.validate();
    activity.range.validate("activity range");
    if (!(activity.range.lo >= 0.0 && activity.range.hi <= 1.0))
      throw ConfigError("activity range must lie in [0,1]");
    channel.mean_db.validate("channel mean_db");
    if (!(std::abs(channel.ar_coeff) < 1.0) || !(channel.sigma_db >= 0.0))
      throw ConfigError("channel AR parameters invalid");
    if (!(backlog.arrival_max_fraction >= 0.0 && backlog.initial_gcycles >= 0.0))
      throw ConfigError("backlog parameters must be nonnegative");
  }
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  int horizon = 180;
  std::vector<int> users{10, 20, 30, 40};
  int episodes = 20;
  std::vector<PolicyTag> policies{kAllPolicies.begin(), kAllPolicies.end()};
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  void validate() const {
    scenario.validate();
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (episodes < 1) throw ConfigError("episodes must be >= 1");
    if (users.empty()) throw ConfigError("user sweep is empty");
    for (int n : users)
      if (n < 1) throw ConfigError("user counts must be >= 1");
    if (policies.empty()) throw ConfigError("no policies selected");
  }
};

/// Users with defaults, per-user overrides and the given activity probabilities.
inline SystemModel build_system(const ScenarioConfig& sc, const std::vector<double>& activity) {
  SystemModel sys;
  sys.pools = sc.pools;
  sys.radio = sc.radio;
  sys.grid = make_action_grid(sc.pools, sc.bandwidth_levels, sc.compute_levels);
  sys.users.resize(activity.size());
  const auto& d = sc.user_defaults;
  for (std::size_t i = 0; i < activity.size(); ++i) {
    auto& u = sys.users[i];
    u.id = i;
    u.activity_prob = activity[i];
    double bw_cost = d.bandwidth_cost, cpu_cost = d.compute_cost;
    u.weight = d.weight;
    u.risk_sensitivity = d.risk_sensitivity;
    u.budget_cap = d.budget_cap;
    u.recovery_rate = d.recovery_rate;
    u.risk_regularization = d.risk_regularization;
    for (const auto& o : sc.overrides) {
      if (o.id != i) continue;
      if (o.weight) u.weight = *o.weight;
      if (o.risk_sensitivity) u.risk_sensitivity = *o.risk_sensitivity;
      if (o.budget_cap) u.budget_cap = *o.budget_cap;
      if (o.recovery_rate) u.recovery_rate = *o.recovery_rate;
      if (o.risk_regularization) u.risk_regularization = *o.risk_regularization;
      if (o.bandwidth_cost) bw_cost = *o.bandwidth_cost;
      if (o.compute_cost) cpu_cost = *o.compute_cost;
    }
    u.cost_bandwidth = bw_cost / sc.pools.total_bandwidth_hz;
    u.cost_compute = cpu_cost / sc.pools.total_compute_hz;
  }
  sys.validate();
  return sys;
}

// ---------------------------------------------------------------------------
// JSON mapping

namespace detail {

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

inline void read_interval(const Json& j, const char* key, Interval& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) throw ConfigError(std::string("config key '") + key + "' must be [lo, hi]");
  out = {v[0].get<double>(), v[1].get<double>()};
}

inline void read_opt(const Json& j, const char* key, std::optional<double>& out) {
  if (j.contains(key)) out = j.at(key).get<double>();
}

inline const Json& section(const Json& j, const char* key) {
  static const Json empty = Json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw ConfigError(std::string("config section '") + key + "' must be an object");
  return j.at(key);
}

}  // namespace detail

inline ExperimentConfig config_from_json(const Json& j) {
  using detail::read;
  using detail::read_interval;
  using detail::section;
  if (!j.is_object()) throw ConfigError("configuration root must be an object");
  ExperimentConfig c;
  auto& sc = c.scenario;
  read(j, "seed", c.seed);
  read(j, "horizon", c.horizon);
  read(j, "episodes", c.episodes);
  read(j, "users", c.users);
  read(j, "output_dir", c.output_dir);
  if (j.contains("policies")) {
    c.policies.clear();
    for (const auto& p : j.at("policies")) c.policies.push_back(parse_policy(p.get<std::string>()));
  }

  const auto& pools = section(j, "pools");
  double bw_mhz = sc.pools.total_bandwidth_hz / kHzPerMegahertz;
  double cpu_ghz = sc.pools.total_compute_hz / kHzPerGigahertz;
  read(pools, "total_bandwidth_mhz", bw_mhz);
  read(pools, "total_compute_ghz", cpu_ghz);
  sc.pools.total_bandwidth_hz = bw_mhz * kHzPerMegahertz;
  sc.pools.total_compute_hz = cpu_ghz * kHzPerGigahertz;
  read(pools, "slot_duration_s", sc.pools.slot_duration_s);
  read(pools, "stability_eps", sc.pools.stability_eps);
  read(pools, "budget_eps", sc.pools.budget_eps);

  const auto& grid = section(j, "grid");
  read(grid, "bandwidth_levels", sc.bandwidth_levels);
  read(grid, "compute_levels", sc.compute_levels);

  const auto& ud = section(j, "users_default");
  read(ud, "weight", sc.user_defaults.weight);
  read(ud, "risk_sensitivity", sc.user_defaults.risk_sensitivity);
  read(ud, "budget_cap", sc.user_defaults.budget_cap);
  read(ud, "recovery_rate", sc.user_defaults.recovery_rate);
  read(ud, "bandwidth_cost", sc.user_defaults.bandwidth_cost);
  read(ud, "compute_cost", sc.user_defaults.compute_cost);
  read(ud, "risk_regularization", sc.user_defaults.risk_regularization);

  if (j.contains("user_overrides")) {
    for (const auto& o : j.at("user_overrides")) {
      UserOverride u;
      if (!o.contains("id")) throw ConfigError("user override without 'id'");
      u.id = o.at("id").get<std::size_t>();
      detail::read_opt(o, "weight", u.weight);
      detail::read_opt(o, "risk_sensitivity", u.risk_sensitivity);
      detail::read_opt(o, "budget_cap", u.budget_cap);
      detail::read_opt(o, "recovery_rate", u.recovery_rate);
      detail::read_opt(o, "bandwidth_cost", u.bandwidth_cost);
      detail::read_opt(o, "compute_cost", u.compute_cost);
      detail::read_opt(o, "risk_regularization", u.risk_regularization);
      sc.overrides.push_back(u);
    }
  }

  const auto& act = section(j, "activity");
  read(act, "trace", sc.activity.trace);
  read(act, "region", sc.activity.region);
  read(act, "days_in_month", sc.activity.days_in_month);
  read(act, "min", sc.activity.range.lo);
  read(act, "max", sc.activity.range.hi);

  const auto& tasks = section(j, "tasks");
  read_interval(tasks, "data_mb", sc.tasks.data_mb);
  read_interval(tasks, "workload_gcycles", sc.tasks.workload_gcycles);
  read_interval(tasks, "deadline_s", sc.tasks.deadline_s);

  const auto& ch = section(j, "channel");
  read_interval(ch, "mean_db", sc.channel.mean_db);
  read(ch, "ar_coeff", sc.channel.ar_coeff);
  read(ch, "sigma_db", sc.channel.sigma_db);

  const auto& radio = section(j, "radio");
  read(radio, "tx_power_w", sc.radio.tx_power_w);
  read(radio, "noise_power_w", sc.radio.noise_power_w);

  const auto& bl = section(j, "backlog");
  read(bl, "arrival_max_fraction", sc.backlog.arrival_max_fraction);
  read(bl, "initial_gcycles", sc.backlog.initial_gcycles);

  const auto& pr = section(j, "predictor");
  read(pr, "window", sc.predictor.window);
  read(pr, "hidden", sc.predictor.hidden);
  read(pr, "learning_rate", sc.predictor.learning_rate);
  read(pr, "clip_norm", sc.predictor.clip_norm);
  read(pr, "batch", sc.predictor.batch);
  read(pr, "residual", sc.predictor.residual);

  const auto& game = section(j, "game");
  read(game, "threshold", sc.game.threshold);
  read(game, "max_iterations", sc.game.max_iterations);
  if (game.contains("selection")) sc.game.rule = parse_selection_rule(game.at("selection").get<std::string>());

  read(section(j, "budget"), "exempt_rejected", sc.exempt_rejected);

  c.validate();
  return c;
}

/// Fully expanded configuration; keys are sorted, so the dump is canonical.
inline Json config_to_json(const ExperimentConfig& c) {
  const auto& sc = c.scenario;
  Json j;
  j["seed"] = c.seed;
  j["horizon"] = c.horizon;
  j["episodes"] = c.episodes;
  j["users"] = c.users;
  j["output_dir"] = c.output_dir;
  j["policies"] = Json::array();
  for (auto p : c.policies) j["policies"].push_back(to_string(p));
  j["pools"] = {{"total_bandwidth_mhz", sc.pools.total_bandwidth_hz / kHzPerMegahertz},
                {"total_compute_ghz", sc.pools.total_compute_hz / kHzPerGigahertz},
                {"slot_duration_s", sc.pools.slot_duration_s},
                {"stability_eps", sc.pools.stability_eps},
                {"budget_eps", sc.pools.budget_eps}};
  j["grid"] = {{"bandwidth_levels", sc.bandwidth_levels}, {"compute_levels", sc.compute_levels}};
  const auto& d = sc.user_defaults;
  j["users_default"] = {{"weight", d.weight},
                        {"risk_sensitivity", d.risk_sensitivity},
                        {"budget_cap", d.budget_cap},
                        {"recovery_rate", d.recovery_rate},
                        {"bandwidth_cost", d.bandwidth_cost},
                        {"compute_cost", d.compute_cost},
                        {"risk_regularization", d.risk_regularization}};
  j["user_overrides"] = Json::array();
  for (const auto& o : sc.overrides) {
    Json e{{"id", o.id}};
    auto put = [&](const char* k, const std::optional<double>& v) {
      if (v) e[k] = *v;
    };
    put("weight", o.weight);
    put("risk_sensitivity", o.risk_sensitivity);
    put("budget_cap", o.budget_cap);
    put("recovery_rate", o.recovery_rate);
    put("bandwidth_cost", o.bandwidth_cost);
    put("compute_cost", o.compute_cost);
    put("risk_regularization", o.risk_regularization);
    j["user_overrides"].push_back(e);
  }
  j["activity"] = {{"trace", sc.activity.trace},
                   {"region", sc.activity.region},
                   {"days_in_month", sc.activity.days_in_month},
                   {"min", sc.activity.range.lo},
                   {"max", sc.activity.range.hi}};
  auto iv = [](const Interval& i) { return Json::array({i.lo, i.hi}); };
  j["tasks"] = {{"data_mb", iv(sc.tasks.data_mb)},
                {"workload_gcycles", iv(sc.tasks.workload_gcycles)},
                {"deadline_s", iv(sc.tasks.deadline_s)}};
  j["channel"] = {{"mean_db", iv(sc.channel.mean_db)},
                  {"ar_coeff", sc.channel.ar_coeff},
                  {"sigma_db", sc.channel.sigma_db}};
  j["radio"] = {{"tx_power_w", sc.radio.tx_power_w}, {"noise_power_w", sc.radio.noise_power_w}};
  j["backlog"] = {{"arrival_max_fraction", sc.backlog.arrival_max_fraction},
                  {"initial_gcycles", sc.backlog.initial_gcycles}};
  j["predictor"] = {{"window", sc.predictor.window},
                    {"hidden", sc.predictor.hidden},
                    {"learning_rate", sc.predictor.learning_rate},
                    {"clip_norm", sc.predictor.clip_norm},
                    {"batch", sc.predictor.batch},
                    {"residual", sc.predictor.residual}};
  j["game"] = {{"threshold", sc.game.threshold},
               {"max_iterations", sc.game.max_iterations},
               {"selection", to_string(sc.game.rule)}};
  j["budget"] = {{"exempt_rejected", sc.exempt_rejected}};
  return j;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

/// FNV-1a over the canonical dump.
inline std::uint64_t config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace aegis

#endif  // AEGIS_CONFIG_HPP
