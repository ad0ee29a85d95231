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

// aegis: command-line front end for the simulator.
//
//   aegis run          one policy, one user count, N episodes (per-episode CSVs)
//   aegis sweep        every policy over the user sweep (metrics + figure CSVs)
//   aegis ablation     AEGIS vs AEGISNoPred on paired seeds
//   aegis oracle-check randomized property checks of the scheduling game
//   aegis config       print the effective configuration as JSON

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "aegis/harness.hpp"
#include "aegis/properties.hpp"

namespace {

using namespace aegis;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::vector<int> users;
  std::string out;
  std::optional<bool> exempt_rejected;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "root seed");
  app->add_option("--episodes", o.episodes, "episodes per sweep point")->check(CLI::PositiveNumber);
  app->add_option("--users", o.users, "user counts, comma separated")->delimiter(',');
  app->add_option("--out", o.out, "output directory");
  app->add_option("--exempt-rejected", o.exempt_rejected,
                  "do not charge the risk budget of rejected tasks (true/false)");
}

ExperimentConfig resolve(const CommonOptions& o) {
  ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.episodes) cfg.episodes = *o.episodes;
  if (!o.users.empty()) cfg.users = o.users;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.exempt_rejected) cfg.scenario.exempt_rejected = *o.exempt_rejected;
  cfg.validate();
  return cfg;
}

void print_row(const MetricsRow& r) {
  std::printf("%-14s n=%-3d TIR %.4f  AVR %.4f  DVBL %.3f  AED %.4g  ASU %.4g  CR %.3f\n", r.policy.c_str(),
              r.n_users, r.tir.mean, r.avr.mean, r.dvbl.mean, r.aed.mean, r.asu.mean, r.cr.mean);
  std::fflush(stdout);
}

int cmd_run(const CommonOptions& o, const std::string& policy_name) {
  ExperimentConfig cfg = resolve(o);
  const PolicyTag policy = parse_policy(policy_name);
  cfg.policies = {policy};
  const std::filesystem::path dir = cfg.output_dir;
  std::filesystem::create_directories(dir);
  std::vector<MetricsRow> rows;
  for (int n : cfg.users) {
    const auto activity = activity_probabilities(cfg, static_cast<std::size_t>(n));
    std::vector<EpisodeMetrics> eps;
    for (int e = 0; e < cfg.episodes; ++e) {
      const auto log = run_episode(cfg, activity, policy, episode_seed(cfg.seed, n, e));
      const std::string stem = log.policy + "_n" + std::to_string(n) + "_e" + std::to_string(e);
      write_file(dir / (stem + "_users.csv"), episode_csv(log));
      write_file(dir / (stem + "_slots.csv"), slots_csv(log));
      eps.push_back(compute_metrics(log));
    }
    rows.push_back(aggregate(to_string(policy), n, eps));
    print_row(rows.back());
  }
  emit_outputs(rows, cfg, dir);
  return 0;
}

int cmd_sweep(const CommonOptions& o) {
  const ExperimentConfig cfg = resolve(o);
  const auto rows = run_sweep(cfg, print_row);
  emit_outputs(rows, cfg, cfg.output_dir);
  std::printf("wrote %s\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_ablation(const CommonOptions& o) {
  ExperimentConfig cfg = resolve(o);
  if (o.users.empty()) cfg.users = {20};
  cfg.policies = {PolicyTag::kAegis, PolicyTag::kAegisNoPred};
  std::vector<EpisodeMetrics> full, nopred;
  const auto rows = run_sweep(cfg, print_row, [&](const EpisodeLog& log) {
    (log.policy == to_string(PolicyTag::kAegis) ? full : nopred).push_back(compute_metrics(log));
  });
  emit_outputs(rows, cfg, cfg.output_dir);

  std::string paired = "n_users,episode,tir_aegis,tir_nopred,avr_aegis,avr_nopred,asu_aegis,asu_nopred,"
                       "cr_aegis,cr_nopred\n";
  std::size_t k = 0;
  for (int n : cfg.users) {
    int wins[4] = {0, 0, 0, 0};
    for (int e = 0; e < cfg.episodes; ++e, ++k) {
      const auto& a = full[k];
      const auto& b = nopred[k];
      wins[0] += a.tir > b.tir;
      wins[1] += a.avr < b.avr;
      wins[2] += a.asu > b.asu;
      wins[3] += a.cr < b.cr;
      paired += std::to_string(n) + "," + std::to_string(e);
      for (auto [x, y] : {std::pair{a.tir, b.tir}, {a.avr, b.avr}, {a.asu, b.asu}, {a.cr, b.cr}})
        paired += "," + format_number(x) + "," + format_number(y);
      paired += "\n";
    }
    std::printf("n=%d episodes where AEGIS has higher TIR %d, lower AVR %d, higher ASU %d, lower CR %d (of %d)\n",
                n, wins[0], wins[1], wins[2], wins[3], cfg.episodes);
  }
  write_file(std::filesystem::path(cfg.output_dir) / "ablation_paired.csv", paired);
  return 0;
}

int cmd_oracle_check(std::uint64_t seed, std::size_t fixtures, std::size_t instances) {
  const auto id = check_potential_identity(fixtures, seed);
  std::printf("potential identity: %zu fixtures, %zu violations, max |dU - dPhi| = %.3g\n", id.fixtures,
              id.violations, id.max_error);
  const auto orc = check_oracle_equivalence(instances, derive_seed(seed, 1));
  std::printf("oracle: %zu instances, %zu brute-force maxima failing the equilibrium check, "
              "%zu within 5%% of the maximum, worst gap %.3g\n",
              orc.instances, orc.brute_not_equilibrium, orc.near_optimal, orc.worst_gap);
  const bool ok = id.violations == 0 && orc.brute_not_equilibrium == 0 &&
                  orc.near_optimal * 10 >= orc.instances * 9;
  std::printf("%s\n", ok ? "ok" : "FAILED");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-budgeted edge inference scheduling simulator"};
  app.set_version_flag("--version", std::string(aegis::kVersion));
  app.require_subcommand(1);

  CommonOptions run_opts, sweep_opts, abl_opts, cfg_opts;
  std::string policy = "AEGIS";
  auto* run = app.add_subcommand("run", "run one policy");
  add_common(run, run_opts);
  run->add_option("--policy", policy, "policy tag");

  auto* sweep = app.add_subcommand("sweep", "run every configured policy over the user sweep");
  add_common(sweep, sweep_opts);

  auto* ablation = app.add_subcommand("ablation", "AEGIS vs AEGISNoPred on paired seeds");
  add_common(ablation, abl_opts);

  std::uint64_t oracle_seed = 1;
  std::size_t fixtures = 10000, instances = 1000;
  auto* oracle = app.add_subcommand("oracle-check", "randomized property checks of the game");
  oracle->add_option("--seed", oracle_seed, "fixture seed");
  oracle->add_option("--fixtures", fixtures, "potential-identity fixtures");
  oracle->add_option("--instances", instances, "brute-force comparison instances");

  auto* config = app.add_subcommand("config", "print the effective configuration");
  add_common(config, cfg_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (run_opts.users.empty()) run_opts.users = {20};
      if (!run_opts.episodes) run_opts.episodes = 1;
      return cmd_run(run_opts, policy);
    }
    if (*sweep) return cmd_sweep(sweep_opts);
    if (*ablation) return cmd_ablation(abl_opts);
    if (*oracle) return cmd_oracle_check(oracle_seed, fixtures, instances);
    if (*config) {
      std::cout << aegis::config_to_json(resolve(cfg_opts)).dump(2) << "\n";
      return 0;
    }
  } catch (const aegis::InvariantError& e) {
    std::fprintf(stderr, "invariant violated: %s\n", e.what());
    return 3;
  } catch (const aegis::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
