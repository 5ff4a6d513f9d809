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

#include "asyncpilot/montecarlo.hpp"

#include "asyncpilot/delay_schemes.hpp"
#include "asyncpilot/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

namespace asyncpilot {

SystemConfig experiment_defaults() {
  SystemConfig c;
  c.antennas = 100;
  c.snr = 100.0;  // 20 dB
  return c;
}

RngStream channel_stream(std::uint64_t seed, int trial, int base_station) {
  return RngStream(seed,
                   RngStream::derive({static_cast<std::uint64_t>(StreamPurpose::Channel),
                                      static_cast<std::uint64_t>(trial),
                                      static_cast<std::uint64_t>(base_station)}));
}

RngStream noise_stream(std::uint64_t seed, int trial, int base_station, TrainingArm arm) {
  return RngStream(seed,
                   RngStream::derive({static_cast<std::uint64_t>(StreamPurpose::Noise),
                                      static_cast<std::uint64_t>(trial),
                                      static_cast<std::uint64_t>(base_station),
                                      static_cast<std::uint64_t>(arm)}));
}

RngStream delay_stream(std::uint64_t seed, int trial) {
  return RngStream(seed, RngStream::derive({static_cast<std::uint64_t>(StreamPurpose::Delays),
                                            static_cast<std::uint64_t>(trial)}));
}

ChannelRealization sample_channel(const ChannelProfile& profile, int antennas,
                                  RngStream& rng) {
  const int n_ues = profile.size();
  CMatrix H(antennas, n_ues);
  for (int u = 0; u < n_ues; ++u) {
    const double scale = std::sqrt(profile.sigma2_flat(u));
    for (int m = 0; m < antennas; ++m) H(m, u) = scale * rng.complex_normal();
  }
  return H;
}

Matrix psd_noise_factor(const Matrix& R_NN) {
  if (R_NN.rows() != R_NN.cols() ||
      (R_NN - R_NN.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("noise covariance must be square and symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(R_NN);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("noise covariance factorization failed");
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-10)
    throw std::invalid_argument("noise covariance is not positive semidefinite");
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) < 1e-12 ? 0.0 : std::sqrt(ev(i));
  Matrix factor = es.eigenvectors() * ev.asDiagonal();

  // Samplers at exactly equal delays observe the same matched-filter output;
  // make their factor rows bit-identical so they share the sample.
  const Eigen::Index n = R_NN.cols();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (R_NN.col(i) == R_NN.col(j)) factor.row(j) = factor.row(i);
  return factor;
}

CMatrix sample_training_noise_with_factor(const Matrix& factor, int antennas, RngStream& rng) {
  const Eigen::Index s = factor.rows();
  CMatrix g(antennas, s);
  for (int m = 0; m < antennas; ++m)
    for (Eigen::Index c = 0; c < s; ++c) g(m, c) = rng.complex_normal();
  return g * factor.transpose();
}

CMatrix sample_training_noise(const Matrix& R_NN, int antennas, RngStream& rng) {
  return sample_training_noise_with_factor(psd_noise_factor(R_NN), antennas, rng);
}

namespace {

CMatrix sample_white_noise(int antennas, Eigen::Index cols, RngStream& rng) {
  CMatrix w(antennas, cols);
  for (int m = 0; m < antennas; ++m)
    for (Eigen::Index c = 0; c < cols; ++c) w(m, c) = rng.complex_normal();
  return w;
}

// Precomputed per-arm training state, shared read-only across trials.
struct BsContext {
  ChannelProfile profile;
  CMatrix R;  // NK x S
  CMatrix X;  // S x NK
};

struct ArmContext {
  TrainingArm arm;
  DelaySchedule data_schedule;  // delays governing data-phase interference
  std::vector<BsContext> bs;
  Matrix noise_factor;  // correlated training noise (oversampled arm only)
  bool correlated = false;
};

ArmContext build_arm_context(const SystemConfig& config, const DelaySchedule& schedule,
                             TrainingArm arm, EstimatorKind estimator) {
  config.validate();
  const double gamma = config.snr;
  switch (arm) {
    case TrainingArm::AsyncOversampled: {
      ArmContext ctx{arm, schedule, {}, Matrix(), true};
      const TrainingMatrices tm = make_training_matrices(schedule, config);
      ctx.noise_factor = psd_noise_factor(tm.R_NN());
      EstimatorMatrix shared_zf;
      if (estimator == EstimatorKind::Zf) shared_zf = zf_matrix(tm.pilots, tm.R_P, gamma);
      for (int k = 0; k < config.cells; ++k) {
        ChannelProfile profile = ChannelProfile::multi_cell(config, k);
        CMatrix X = (estimator == EstimatorKind::Zf)
                        ? shared_zf.X
                        : lmmse_matrix(tm.pilots, tm.R_P, profile, gamma).X;
        ctx.bs.push_back({std::move(profile), tm.R, std::move(X)});
      }
      return ctx;
    }
    case TrainingArm::SyncBaseline: {
      // Conventional synchronous scenario: training and data are both
      // synchronous regardless of the requested schedule; estimation is
      // always the regularized LMMSE path.
      DelaySchedule sync = DelaySchedule::synchronous(config.cells, config.users_per_cell,
                                                      config.symbol_duration);
      ArmContext ctx{arm, sync, {}, Matrix(), false};
      const CMatrix R = baseline_synchronous_training(config).R;
      for (int k = 0; k < config.cells; ++k) {
        ChannelProfile profile = ChannelProfile::multi_cell(config, k);
        CMatrix X = lmmse_matrix_white(R, profile, gamma);
        ctx.bs.push_back({std::move(profile), R, std::move(X)});
      }
      return ctx;
    }
    case TrainingArm::AsyncNoOversampling: {
      // Single-sample receiver on asynchronous arrivals: each base station
      // samples at the timing of its first served user.
      ArmContext ctx{arm, schedule, {}, Matrix(), false};
      const PilotMatrix pilots = build_pilots(config);
      for (int k = 0; k < config.cells; ++k) {
        const int sampler = schedule.flat_index(k, 0);
        CMatrix R = single_sampler_training(schedule, pilots, config, sampler).R;
        ChannelProfile profile = ChannelProfile::multi_cell(config, k);
        CMatrix X = lmmse_matrix_white(R, profile, gamma);
        ctx.bs.push_back({std::move(profile), std::move(R), std::move(X)});
      }
      return ctx;
    }
  }
  throw std::logic_error("unknown training arm");
}

TrialResult run_trial_with_context(const SystemConfig& config, const ArmContext& ctx,
                                   int trial_index, std::uint64_t seed,
                                   const TrialOptions& options) {
  const double gamma = config.snr;
  const int M = config.antennas;
  const int NK = config.n_ues();

  TrialResult out;
  out.per_ue_rate.assign(NK, 0.0);
  double err_sum = 0.0;
  for (int k = 0; k < config.cells; ++k) {
    const BsContext& bs = ctx.bs[k];
    RngStream ch = channel_stream(seed, trial_index, k);
    const CMatrix H = sample_channel(bs.profile, M, ch);

    RngStream nz = noise_stream(seed, trial_index, k, ctx.arm);
    CMatrix W = ctx.correlated ? sample_training_noise_with_factor(ctx.noise_factor, M, nz)
                               : sample_white_noise(M, bs.R.cols(), nz);
    if (options.noise_scale != 1.0) W *= options.noise_scale;

    const CMatrix Y = std::sqrt(gamma) * (H * bs.R) + W;
    const CMatrix H_hat = Y * bs.X;
    err_sum += (H_hat - H).squaredNorm();

    for (int n = 0; n < config.users_per_cell; ++n) {
      const double s = sinr(H, H_hat, ctx.data_schedule, gamma, k, n);
      out.per_ue_rate[ctx.data_schedule.flat_index(k, n)] = std::log2(1.0 + s);
    }
  }
  out.squared_error = err_sum / (static_cast<double>(config.cells) * NK * M);
  return out;
}

// Runs trials (parallel over `jobs`), storing results by trial index so the
// reduction order, and hence the output, is independent of the job count.
std::vector<TrialResult> run_trials(const SystemConfig& config,
                                    const std::function<ArmContext(int)>& context_of,
                                    const ArmContext* shared_context, int trials,
                                    std::uint64_t seed, int jobs, const TrialOptions& options) {
  std::vector<TrialResult> results(trials);
  auto work = [&](int t) {
    if (shared_context) {
      results[t] = run_trial_with_context(config, *shared_context, t, seed, options);
    } else {
      const ArmContext ctx = context_of(t);
      results[t] = run_trial_with_context(config, ctx, t, seed, options);
    }
  };
  const int n_jobs = std::max(1, jobs);
  if (n_jobs == 1 || trials < 2) {
    for (int t = 0; t < trials; ++t) work(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(n_jobs);
    for (int w = 0; w < n_jobs; ++w)
      workers.emplace_back([&] {
        for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) work(t);
      });
    for (auto& th : workers) th.join();
  }
  return results;
}

RateResult reduce_rates(const std::vector<TrialResult>& results, std::uint64_t seed) {
  RateResult r;
  r.trials = static_cast<int>(results.size());
  r.seed = seed;
  if (results.empty()) return r;
  const int n_ues = static_cast<int>(results.front().per_ue_rate.size());
  r.per_ue.assign(n_ues, 0.0);
  std::vector<double> trial_means(results.size());
  for (size_t t = 0; t < results.size(); ++t) {
    double mean = 0.0;
    for (int u = 0; u < n_ues; ++u) {
      r.per_ue[u] += results[t].per_ue_rate[u];
      mean += results[t].per_ue_rate[u];
    }
    trial_means[t] = mean / n_ues;
  }
  for (double& v : r.per_ue) v /= static_cast<double>(results.size());
  double grand = 0.0;
  for (double m : trial_means) grand += m;
  grand /= static_cast<double>(trial_means.size());
  r.average = grand;
  if (results.size() > 1) {
    double ss = 0.0;
    for (double m : trial_means) ss += (m - grand) * (m - grand);
    const double stddev = std::sqrt(ss / (trial_means.size() - 1.0));
    r.ci_halfwidth = 1.96 * stddev / std::sqrt(static_cast<double>(trial_means.size()));
  }
  return r;
}

DelaySchedule random_schedule(const SystemConfig& config, RngStream& rng) {
  std::vector<double> taus(static_cast<size_t>(config.n_ues()));
  for (double& t : taus) t = rng.uniform() * config.symbol_duration;
  return DelaySchedule(config.cells, config.users_per_cell, config.symbol_duration,
                       std::move(taus));
}

}  // namespace

TrialResult run_trial(const SystemConfig& config, const DelaySchedule& schedule, TrainingArm arm,
                      EstimatorKind estimator, int trial_index, std::uint64_t seed,
                      const TrialOptions& options) {
  const ArmContext ctx = build_arm_context(config, schedule, arm, estimator);
  return run_trial_with_context(config, ctx, trial_index, seed, options);
}

double empirical_mse(const SystemConfig& config, const DelaySchedule& schedule,
                     EstimatorKind estimator, int trials, std::uint64_t seed, int jobs,
                     double noise_scale) {
  const ArmContext ctx =
      build_arm_context(config, schedule, TrainingArm::AsyncOversampled, estimator);
  TrialOptions options;
  options.noise_scale = noise_scale;
  const auto results = run_trials(config, {}, &ctx, trials, seed, jobs, options);
  double sum = 0.0;
  for (const auto& r : results) sum += r.squared_error;
  return sum / static_cast<double>(results.size());
}

double analytic_mse_reference(const SystemConfig& config, const DelaySchedule& schedule,
                              EstimatorKind estimator) {
  const PilotMatrix pilots = build_pilots(config);
  const Matrix R_P = build_R_P(schedule, config);
  if (estimator == EstimatorKind::Zf) return analytic_mse_zf(pilots, R_P, config.snr);
  double sum = 0.0;
  for (int k = 0; k < config.cells; ++k)
    sum += analytic_mse_lmmse(pilots, R_P, ChannelProfile::multi_cell(config, k), config.snr);
  return sum / config.cells;
}

RateResult average_rate(const SystemConfig& config, const DelaySchedule& schedule,
                        TrainingArm arm, EstimatorKind estimator, int trials, std::uint64_t seed,
                        int jobs) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const ArmContext ctx = build_arm_context(config, schedule, arm, estimator);
  return reduce_rates(run_trials(config, {}, &ctx, trials, seed, jobs, {}), seed);
}

RateResult average_rate(const SystemConfig& config, const DelaySchedule& schedule,
                        EstimatorKind estimator, int trials, std::uint64_t seed, int jobs) {
  return average_rate(config, schedule, TrainingArm::AsyncOversampled, estimator, trials, seed,
                      jobs);
}

DelaySchedule make_schedule(const ScheduleSpec& spec, const SystemConfig& config,
                            std::uint64_t seed) {
  switch (spec.kind) {
    case ScheduleKind::EquallyDivided:
      return equally_divided_schedule(config.cells, config.users_per_cell,
                                      config.symbol_duration);
    case ScheduleKind::Synchronous:
      return DelaySchedule::synchronous(config.cells, config.users_per_cell,
                                        config.symbol_duration);
    case ScheduleKind::Explicit:
      return DelaySchedule(config.cells, config.users_per_cell, config.symbol_duration,
                           spec.explicit_delays);
    case ScheduleKind::Random: {
      RngStream rng = delay_stream(seed, 0);
      return random_schedule(config, rng);
    }
    case ScheduleKind::ExhaustiveOptimal: {
      SearchSpec search;
      search.objective = SearchObjective::TraceInvA;
      return exhaustive_search(config, search).best;
    }
  }
  throw std::logic_error("unknown schedule kind");
}

std::string arm_name(TrainingArm arm) {
  switch (arm) {
    case TrainingArm::AsyncOversampled: return "async_oversampled";
    case TrainingArm::SyncBaseline: return "sync_baseline";
    case TrainingArm::AsyncNoOversampling: return "async_no_oversampling";
  }
  return "?";
}

std::string sweep_variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::SnrDb: return "snr_db";
    case SweepVariable::Antennas: return "antennas";
    case SweepVariable::Cells: return "cells";
    case SweepVariable::UsersPerCell: return "users_per_cell";
    case SweepVariable::PilotKind: return "pilot";
    case SweepVariable::DelayScheme: return "delay_scheme";
  }
  return "?";
}

namespace {

int parse_positive_int(const std::string& s, const char* what) {
  size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || v < 1)
    throw std::invalid_argument(std::string(what) + ": expected a positive integer, got '" + s +
                                "'");
  return v;
}

double parse_double(const std::string& s, const char* what) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size())
    throw std::invalid_argument(std::string(what) + ": expected a number, got '" + s + "'");
  return v;
}

std::string default_scenario_id(const SystemConfig& c, const ScheduleSpec& s) {
  std::string id = "K" + std::to_string(c.cells) + "N" + std::to_string(c.users_per_cell) + "M" +
                   std::to_string(c.antennas);
  id += c.pilot_kind == PilotKind::Identity ? "_identity" : "_dft";
  switch (s.kind) {
    case ScheduleKind::EquallyDivided: id += "_equally_divided"; break;
    case ScheduleKind::Random: id += "_random"; break;
    case ScheduleKind::Explicit: id += "_explicit"; break;
    case ScheduleKind::Synchronous: id += "_synchronous"; break;
    case ScheduleKind::ExhaustiveOptimal: id += "_exhaustive_optimal"; break;
  }
  return id;
}

}  // namespace

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (spec.arms.empty()) throw std::invalid_argument("sweep needs at least one arm");
  spec.base.validate();

  const std::string scenario =
      spec.scenario_id.empty() ? default_scenario_id(spec.base, spec.schedule) : spec.scenario_id;
  const std::string var_name = sweep_variable_name(spec.variable);

  std::vector<ResultRow> rows;
  for (const std::string& value : spec.values) {
    SystemConfig cfg = spec.base;
    ScheduleSpec sched_spec = spec.schedule;
    switch (spec.variable) {
      case SweepVariable::SnrDb:
        cfg.snr = std::pow(10.0, parse_double(value, "snr_db") / 10.0);
        break;
      case SweepVariable::Antennas: cfg.antennas = parse_positive_int(value, "antennas"); break;
      case SweepVariable::Cells: cfg.cells = parse_positive_int(value, "cells"); break;
      case SweepVariable::UsersPerCell:
        cfg.users_per_cell = parse_positive_int(value, "users_per_cell");
        break;
      case SweepVariable::PilotKind:
        if (value == "identity") {
          cfg.pilot_kind = PilotKind::Identity;
        } else if (value == "dft") {
          cfg.pilot_kind = PilotKind::NormalizedDft;
        } else {
          throw std::invalid_argument("pilot kind must be identity or dft, got '" + value + "'");
        }
        break;
      case SweepVariable::DelayScheme:
        if (value == "equally_divided") {
          sched_spec.kind = ScheduleKind::EquallyDivided;
        } else if (value == "random") {
          sched_spec.kind = ScheduleKind::Random;
        } else if (value == "synchronous") {
          sched_spec.kind = ScheduleKind::Synchronous;
        } else if (value == "exhaustive_optimal") {
          sched_spec.kind = ScheduleKind::ExhaustiveOptimal;
        } else {
          throw std::invalid_argument("unknown delay scheme '" + value + "'");
        }
        break;
    }
    cfg.validate();

    for (TrainingArm arm : spec.arms) {
      ResultRow row;
      row.scenario_id = scenario;
      row.arm = arm_name(arm);
      row.sweep_var = var_name;
      row.sweep_value = value;
      row.trials = spec.trials;
      row.seed = spec.seed;
      try {
        RateResult rate;
        if (sched_spec.kind == ScheduleKind::Random && arm != TrainingArm::SyncBaseline) {
          // Random delays are redrawn per trial; the per-trial stream excludes
          // the arm so all arms see the same delay draws.
          auto context_of = [&](int trial) {
            RngStream rng = delay_stream(spec.seed, trial);
            return build_arm_context(cfg, random_schedule(cfg, rng), arm, spec.estimator);
          };
          rate = reduce_rates(
              run_trials(cfg, context_of, nullptr, spec.trials, spec.seed, spec.jobs, {}),
              spec.seed);
        } else {
          const DelaySchedule schedule = make_schedule(sched_spec, cfg, spec.seed);
          rate = average_rate(cfg, schedule, arm, spec.estimator, spec.trials, spec.seed,
                              spec.jobs);
        }
        row.metric = "avg_rate_per_ue";
        row.value = rate.average;
        row.ci_halfwidth = rate.ci_halfwidth;
      } catch (const SingularPilotSystem&) {
        row.metric = "error:SingularPilotSystem";
        row.value = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(std::move(row));
    }
  }

  auto numeric = [](const std::string& s, double& out) {
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && !s.empty();
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const ResultRow& a, const ResultRow& b) {
    double na = 0.0, nb = 0.0;
    const bool an = numeric(a.sweep_value, na), bn = numeric(b.sweep_value, nb);
    if (an && bn && na != nb) return na < nb;
    if ((!an || !bn) && a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
    if (a.arm != b.arm) return a.arm < b.arm;
    return a.metric < b.metric;
  });
  return rows;
}

}  // namespace asyncpilot
