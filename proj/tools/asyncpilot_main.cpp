// SPDX-License-Identifier: Apache-2.0
//
// asyncpilot - asynchronous uplink channel training simulation for multi-cell massive MIMO
// Copyright (C) 2026 asyncpilot developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "asyncpilot/config_file.hpp"
#include "asyncpilot/csv_io.hpp"
#include "asyncpilot/delay_schemes.hpp"
#include "asyncpilot/errors.hpp"
#include "asyncpilot/montecarlo.hpp"
#include "asyncpilot/verification.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitSingular = 3;
constexpr int kExitVerifyFailed = 4;

int jobs_or_env(std::optional<int> jobs_flag) {
  if (jobs_flag) return std::max(1, *jobs_flag);
  if (const char* env = std::getenv("ASYNCPILOT_JOBS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
  auto* c = cmd->add_option("--config", args.config_path, "experiment config file (INI)");
  if (config_required) c->required();
  cmd->add_option("--seed", args.seed, "seed override");
  cmd->add_option("--out", args.out_dir, "output directory override");
  cmd->add_option("--jobs", args.jobs, "worker threads (env ASYNCPILOT_JOBS)");
}

std::string ensure_out_dir(const asyncpilot::ExperimentConfig& cfg, const CommonArgs& args) {
  const std::string dir = args.out_dir ? *args.out_dir : cfg.output.path;
  std::filesystem::create_directories(dir);
  return dir;
}

int cmd_matrices(const CommonArgs& args) {
  using namespace asyncpilot;
  const ExperimentConfig cfg = load_config(args.config_path);
  const std::uint64_t seed = args.seed ? *args.seed : (cfg.sweep ? cfg.sweep->seed : 1);
  const DelaySchedule schedule = make_schedule(cfg.schedule, cfg.system, seed);
  const TrainingMatrices tm = make_training_matrices(schedule, cfg.system);

  const std::string dir = ensure_out_dir(cfg, args);
  write_matrix_csv(dir + "/R.csv", tm.R);
  write_matrix_csv(dir + "/R_P.csv", tm.R_P);
  write_matrix_csv(dir + "/A.csv", tm.A);
  std::cout << "wrote " << dir << "/R.csv (" << tm.R.rows() << "x" << tm.R.cols() << "), "
            << dir << "/R_P.csv (" << tm.R_P.rows() << "x" << tm.R_P.cols() << "), " << dir
            << "/A.csv (" << tm.A.rows() << "x" << tm.A.cols() << ")\n";
  if (tm.a_singular()) std::cout << "singular: pilot contamination\n";
  return 0;
}

int cmd_mse(const CommonArgs& args) {
  using namespace asyncpilot;
  const ExperimentConfig cfg = load_config(args.config_path);
  const std::uint64_t seed = args.seed ? *args.seed : (cfg.sweep ? cfg.sweep->seed : 1);
  const DelaySchedule schedule = make_schedule(cfg.schedule, cfg.system, seed);
  const TrainingMatrices tm = make_training_matrices(schedule, cfg.system);
  const double gamma = cfg.system.snr;

  std::vector<ResultRow> rows;
  auto emit = [&](const std::string& metric, double value) {
    std::cout << metric << " " << format_full(value) << "\n";
    rows.push_back({"mse", "analytic", "none", "0", metric, value, 0.0, 0, seed});
  };

  emit("mse_lmmse", analytic_mse_reference(cfg.system, schedule, EstimatorKind::Lmmse));

  int exit_code = 0;
  try {
    emit("mse_zf", analytic_mse_zf(tm.pilots, tm.R_P, gamma));
    emit("zf_bound", zf_mse_upper_bound(tm.A, gamma));
  } catch (const SingularPilotSystem&) {
    std::cout << "mse_zf error SingularPilotSystem\n";
    rows.push_back({"mse", "analytic", "none", "0", "error:SingularPilotSystem",
                    std::numeric_limits<double>::quiet_NaN(), 0.0, 0, seed});
    exit_code = kExitSingular;
  }
  if (cfg.schedule.kind == ScheduleKind::EquallyDivided &&
      cfg.system.pilot_kind == PilotKind::Identity && cfg.system.cells >= 2) {
    emit("mse_zf_closed_form",
         total_mse_closed_form(cfg.system.cells, cfg.system.users_per_cell, gamma));
    if (!within_proven_cell_range(cfg.system.cells))
      std::cout << "note: optimality unproven for K outside [2, 7]\n";
  }

  std::sort(rows.begin(), rows.end(),
            [](const ResultRow& a, const ResultRow& b) { return a.metric < b.metric; });
  const std::string dir = ensure_out_dir(cfg, args);
  write_result_csv(dir + "/mse.csv", rows);
  return exit_code;
}

int cmd_sweep(const CommonArgs& args) {
  using namespace asyncpilot;
  const ExperimentConfig cfg = load_config(args.config_path);
  if (!cfg.sweep) throw ConfigError("sweep command needs a [sweep] section");
  SweepSpec spec = *cfg.sweep;
  if (args.seed) spec.seed = *args.seed;
  spec.jobs = jobs_or_env(args.jobs);

  const std::vector<ResultRow> rows = run_sweep(spec);
  const std::string dir = ensure_out_dir(cfg, args);
  write_result_csv(dir + "/results.csv", rows);
  if (cfg.output.plot_data)
    write_plot_data(dir, spec.scenario_id.empty() ? rows.front().scenario_id : spec.scenario_id,
                    rows);
  std::cout << "wrote " << rows.size() << " rows to " << dir << "/results.csv\n";
  return 0;
}

int cmd_delay_search(const CommonArgs& args, double grid_step, const std::string& objective,
                     int trials) {
  using namespace asyncpilot;
  const ExperimentConfig cfg = load_config(args.config_path);
  const std::uint64_t seed = args.seed ? *args.seed : (cfg.sweep ? cfg.sweep->seed : 1);

  SearchSpec spec;
  spec.grid_step = grid_step;
  spec.jobs = jobs_or_env(args.jobs);
  if (objective == "rate") {
    spec.objective = SearchObjective::AverageRate;
    const EstimatorKind estimator = cfg.sweep ? cfg.sweep->estimator : EstimatorKind::Lmmse;
    spec.rate_evaluator = [&, estimator](const DelaySchedule& s) {
      return average_rate(cfg.system, s, estimator, trials, seed).average;
    };
  }

  const SearchResult result = exhaustive_search(cfg.system, spec);
  std::cout << "searched " << result.space_size << " grid points\n";
  std::cout << "best objective " << format_full(result.best_objective) << " at delays";
  for (double t : result.best.taus()) std::cout << " " << format_full(t);
  std::cout << "\n";

  const std::string dir = ensure_out_dir(cfg, args);
  std::ofstream table(dir + "/grid.csv", std::ios::binary);
  for (int u = 0; u < cfg.system.n_ues(); ++u) table << "tau_" << (u + 1) << ",";
  table << "objective,singular\n";
  for (const GridRow& row : result.table) {
    for (double t : row.delays) table << format_full(t) << ",";
    table << format_full(row.objective) << "," << (row.singular ? 1 : 0) << "\n";
  }
  std::cout << "wrote " << dir << "/grid.csv\n";
  return 0;
}

int cmd_verify(const CommonArgs& args, const std::string& level, double perturb_mu) {
  using namespace asyncpilot;
  VerifyOptions options;
  options.jobs = jobs_or_env(args.jobs);
  if (args.seed) options.seed = *args.seed;
  options.perturb_mu = perturb_mu;
  const auto results = run_verification(
      level == "full" ? VerifyLevel::Full : VerifyLevel::Fast, options);
  const bool ok = print_verification_report(results, std::cout);
  return ok ? 0 : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asynchronous uplink channel training simulator"};
  app.require_subcommand(1);

  CommonArgs matrices_args, mse_args, sweep_args, search_args, verify_args;

  auto* matrices = app.add_subcommand("matrices", "write R, R_P and A as CSV");
  add_common(matrices, matrices_args);

  auto* mse = app.add_subcommand("mse", "print analytic estimator MSEs and the ZF bound");
  add_common(mse, mse_args);

  auto* sweep = app.add_subcommand("sweep", "run a Monte Carlo parameter sweep");
  add_common(sweep, sweep_args);

  auto* search = app.add_subcommand("delay-search", "exhaustive grid search over delays");
  add_common(search, search_args);
  double grid_step = 0.05;
  std::string objective = "trace";
  int search_trials = 100;
  search->add_option("--grid-step", grid_step, "grid step (must divide T)");
  search->add_option("--objective", objective, "trace | rate")
      ->check(CLI::IsMember({"trace", "rate"}));
  search->add_option("--trials", search_trials, "Monte Carlo trials per point (rate objective)");

  auto* verify = app.add_subcommand("verify", "run the numerical verification suite");
  add_common(verify, verify_args, false);
  std::string level = "fast";
  double perturb_mu = 0.0;
  verify->add_option("--level", level, "fast | full")->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--perturb-mu", perturb_mu,
                     "fault-injection hook: perturb the closed-form inverse");

  CLI11_PARSE(app, argc, argv);

  try {
    if (matrices->parsed()) return cmd_matrices(matrices_args);
    if (mse->parsed()) return cmd_mse(mse_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (search->parsed()) return cmd_delay_search(search_args, grid_step, objective, search_trials);
    if (verify->parsed()) return cmd_verify(verify_args, level, perturb_mu);
  } catch (const asyncpilot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const asyncpilot::SearchSpaceTooLarge& e) {
    std::cerr << "search error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const asyncpilot::SingularPilotSystem& e) {
    std::cerr << "singular system: " << e.what() << "\n";
    return kExitSingular;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
