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

#include "asyncpilot/delay_schemes.hpp"

#include "asyncpilot/errors.hpp"
#include "asyncpilot/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace asyncpilot {

GroupLayout GroupLayout::uniform(int groups, double symbol_duration) {
  GroupLayout layout;
  layout.symbol_duration = symbol_duration;
  layout.boundaries.resize(groups + 1);
  for (int i = 0; i <= groups; ++i)
    layout.boundaries[i] = (static_cast<double>(i) / groups) * symbol_duration;
  return layout;
}

void GroupLayout::validate() const {
  if (boundaries.size() < 2) throw std::invalid_argument("layout needs at least one group");
  if (boundaries.front() != 0.0 || boundaries.back() != symbol_duration)
    throw std::invalid_argument("layout boundaries must span [0, T]");
  for (size_t i = 1; i < boundaries.size(); ++i)
    if (boundaries[i] < boundaries[i - 1])
      throw std::invalid_argument("layout boundaries must be nondecreasing");
}

DelaySchedule equally_divided_schedule(int cells, int users_per_cell, double symbol_duration) {
  if (cells < 1 || users_per_cell < 1)
    throw std::invalid_argument("equally_divided_schedule needs K >= 1, N >= 1");
  const int K = cells;
  const int N = users_per_cell;
  return DelaySchedule::from_function(K, N, symbol_duration, [&](int k, int n) {
    const double frac = (K > 1) ? static_cast<double>(k) / (K - 1) : 0.0;
    return ((n + frac) / N) * symbol_duration;
  });
}

DelaySchedule schedule_from_layout(const GroupLayout& layout, int cells) {
  layout.validate();
  if (cells < 1) throw std::invalid_argument("cells must be >= 1");
  const int K = cells;
  return DelaySchedule::from_function(K, layout.groups(), layout.symbol_duration,
                                      [&](int k, int n) {
                                        if (K == 1 || k == 0) return layout.boundaries[n];
                                        if (k == K - 1) return layout.boundaries[n + 1];
                                        return layout.boundaries[n] +
                                               k * layout.width(n) / (K - 1);
                                      });
}

InterferenceReport check_interference_free(const DelaySchedule& schedule,
                                           const PilotMatrix& pilots, double tol) {
  if (pilots.kind != PilotKind::Identity)
    throw std::invalid_argument("check_interference_free requires identity pilots");
  SystemConfig config;
  config.cells = schedule.cells();
  config.users_per_cell = schedule.users_per_cell();
  config.symbol_duration = schedule.symbol_duration();
  config.pilot_kind = PilotKind::Identity;
  const Matrix R_P = build_R_P(schedule, config);
  const CMatrix A = build_A(pilots, R_P, config);

  InterferenceReport report;
  const int N = schedule.users_per_cell();
  for (int r = 0; r < A.rows(); ++r)
    for (int t = 0; t < A.cols(); ++t) {
      if (r % N == t % N) continue;  // same pilot group
      const double mag = std::abs(A(r, t));
      if (mag >= tol) {
        report.interference_free = false;
        report.violations.push_back({r, t, mag});
      }
    }
  return report;
}

Matrix group_A(const std::vector<double>& deltas) {
  const int K = static_cast<int>(deltas.size()) + 1;
  double total = 0.0;
  for (double d : deltas) {
    if (d < 0.0) throw std::invalid_argument("group gaps must be >= 0");
    total += d;
  }
  if (total > 1.0 + 1e-12) throw std::invalid_argument("group gaps must sum to <= 1");

  std::vector<double> prefix(K, 0.0);  // prefix[i] = delta_0 + ... + delta_{i-1}
  for (int i = 1; i < K; ++i) prefix[i] = prefix[i - 1] + deltas[i - 1];

  Matrix A = Matrix::Zero(K, K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) A(a, b) = 1.0 - std::abs(prefix[b] - prefix[a]);
  return A;
}

namespace {

Matrix inverse_A_closed_form_impl(int cells, double delta_prime, double mu_perturbation) {
  const int K = cells;
  if (K < 2) throw std::invalid_argument("closed-form inverse needs K >= 2");
  if (!(delta_prime > 0.0))
    throw std::domain_error("closed-form inverse is singular at delta' = 0");
  if (delta_prime > 1.0 / (K - 1) + 1e-12)
    throw std::domain_error("delta' must not exceed 1/(K-1)");

  const double mu = delta_prime / ((K - 1) * delta_prime - 2.0) + mu_perturbation;
  Matrix m = Matrix::Zero(K, K);
  for (int i = 0; i < K; ++i) m(i, i) = 2.0;
  for (int i = 0; i + 1 < K; ++i) {
    m(i, i + 1) = -1.0;
    m(i + 1, i) = -1.0;
  }
  m(0, 0) = 1.0 - mu;
  m(K - 1, K - 1) = 1.0 - mu;
  m(0, K - 1) += -mu;
  m(K - 1, 0) += -mu;
  return m / (2.0 * delta_prime);
}

}  // namespace

Matrix inverse_A_closed_form(int cells, double delta_prime) {
  return inverse_A_closed_form_impl(cells, delta_prime, 0.0);
}

Matrix inverse_A_closed_form_perturbed(int cells, double delta_prime, double mu_perturbation) {
  return inverse_A_closed_form_impl(cells, delta_prime, mu_perturbation);
}

double group_mse_closed_form(int cells, double group_width, double gamma,
                             double symbol_duration) {
  const int K = cells;
  const double T = symbol_duration;
  if (K < 2) throw std::invalid_argument("group MSE closed form needs K >= 2");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (!(group_width > 0.0) || group_width > T + 1e-12)
    throw std::domain_error("group width must lie in (0, T]");
  return (T / (K * gamma)) *
         ((K - 1.0) * (K - 1.0) / group_width + 1.0 / (2.0 * T - group_width));
}

double total_mse_closed_form(int cells, int users_per_cell, double gamma) {
  const int K = cells;
  const int N = users_per_cell;
  if (K < 2) throw std::invalid_argument("total MSE closed form needs K >= 2");
  if (N < 1) throw std::invalid_argument("users_per_cell must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  return (static_cast<double>(N) / (K * gamma)) *
         ((K - 1.0) * (K - 1.0) + 1.0 / (2.0 * N - 1.0));
}

namespace {

// Trace of the inverse through the eigenvalues; +inf when singular relative
// to kSingularTol * lambda_max.
constexpr double kGridSingularRelTol = 1e-10;

std::pair<double, bool> trace_inverse_or_inf(const CMatrix& A) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(A, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double lmax = ev.maxCoeff();
  if (!(ev.minCoeff() > kGridSingularRelTol * lmax))
    return {std::numeric_limits<double>::infinity(), true};
  double tr = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) tr += 1.0 / ev(i);
  return {tr, false};
}

}  // namespace

SearchResult exhaustive_search(const SystemConfig& config, const SearchSpec& spec) {
  config.validate();
  const double T = config.symbol_duration;
  const double ratio = T / spec.grid_step;
  const long long steps = std::llround(ratio);
  if (!(spec.grid_step > 0.0) || std::abs(steps * spec.grid_step - T) > 1e-12)
    throw std::invalid_argument("grid_step must divide the symbol duration");
  const int points = static_cast<int>(steps) + 1;

  const int n_ues = config.n_ues();
  const int free_dims = n_ues - (spec.fix_first ? 1 : 0);
  std::uint64_t space = 1;
  for (int d = 0; d < free_dims; ++d) {
    if (space > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(points))
      throw SearchSpaceTooLarge("search space size overflows",
                                std::numeric_limits<std::uint64_t>::max());
    space *= static_cast<std::uint64_t>(points);
  }
  if (space > spec.max_evaluations)
    throw SearchSpaceTooLarge("search space of " + std::to_string(space) +
                                  " grid points exceeds the cap of " +
                                  std::to_string(spec.max_evaluations),
                              space);
  if (spec.objective == SearchObjective::AverageRate && !spec.rate_evaluator)
    throw std::invalid_argument("AverageRate objective requires a rate evaluator");

  const PilotMatrix pilots = build_pilots(config);
  std::vector<GridRow> table(space);

  auto delays_of = [&](std::uint64_t g) {
    std::vector<double> taus(n_ues, 0.0);
    std::uint64_t rem = g;
    for (int c = free_dims - 1; c >= 0; --c) {
      const int digit = static_cast<int>(rem % points);
      rem /= points;
      taus[c + (spec.fix_first ? 1 : 0)] = std::min(digit * spec.grid_step, T);
    }
    return taus;
  };

  auto evaluate = [&](std::uint64_t g) {
    GridRow row;
    row.delays = delays_of(g);
    DelaySchedule sched(config.cells, config.users_per_cell, T, row.delays);
    if (spec.objective == SearchObjective::TraceInvA) {
      const Matrix R_P = build_R_P(sched, config);
      const auto [tr, singular] = trace_inverse_or_inf(build_A(pilots, R_P, config));
      row.singular = singular;
      row.objective = singular ? tr : tr / (n_ues * config.snr);
    } else {
      row.singular = false;
      row.objective = spec.rate_evaluator(sched);
    }
    return row;
  };

  const int jobs = std::max(1, spec.jobs);
  if (jobs == 1 || space < 2) {
    for (std::uint64_t g = 0; g < space; ++g) table[g] = evaluate(g);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (std::uint64_t g = next.fetch_add(1); g < space; g = next.fetch_add(1))
          table[g] = evaluate(g);
      });
    for (auto& t : workers) t.join();
  }

  // Scan in enumeration order; strict improvement keeps the lexicographically
  // smallest delay vector among ties.
  std::uint64_t best_idx = 0;
  const bool maximize = spec.objective == SearchObjective::AverageRate;
  for (std::uint64_t g = 1; g < space; ++g) {
    const double cur = table[g].objective;
    const double best = table[best_idx].objective;
    if (maximize ? (cur > best) : (cur < best)) best_idx = g;
  }

  SearchResult result{DelaySchedule(config.cells, config.users_per_cell, T,
                                    table[best_idx].delays),
                      table[best_idx].objective, space, std::move(table)};
  return result;
}

Matrix exchange_matrix(int n) {
  Matrix j = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) j(i, n - 1 - i) = 1.0;
  return j;
}

namespace {

double trace_inverse_pd(const Matrix& m, const char* who) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(std::string(who) + ": matrix is not positive definite");
  return llt.solve(Matrix::Identity(m.rows(), m.cols())).trace();
}

}  // namespace

ConvexityReport verify_convexity(const Matrix& A, int num_points) {
  if (num_points < 1) throw std::invalid_argument("num_points must be >= 1");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("verify_convexity requires a symmetric matrix");
  const Matrix J = exchange_matrix(static_cast<int>(A.rows()));
  const Matrix JAJ = J * A * J;

  const int P = num_points;
  const double h = 1.0 / (P + 1);
  std::vector<double> f(P + 2);
  for (int j = 0; j <= P + 1; ++j) {
    const double s = j * h;
    const Matrix blend = (1.0 - s) * A + s * JAJ;
    Eigen::LLT<Matrix> llt(blend);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("singular blend matrix at s = " + std::to_string(s));
    f[j] = llt.solve(Matrix::Identity(A.rows(), A.cols())).trace();
  }

  ConvexityReport report;
  report.f0 = f.front();
  report.f1 = f.back();
  report.f_half = trace_inverse_pd(0.5 * (A + JAJ), "verify_convexity");
  report.min_second_difference = std::numeric_limits<double>::infinity();
  report.max_deviation_from_f0 = 0.0;
  for (int j = 1; j <= P; ++j) {
    report.min_second_difference =
        std::min(report.min_second_difference, f[j - 1] - 2.0 * f[j] + f[j + 1]);
  }
  for (int j = 0; j <= P + 1; ++j)
    report.max_deviation_from_f0 =
        std::max(report.max_deviation_from_f0, std::abs(f[j] - report.f0));
  return report;
}

SymmetryReport verify_symmetric_delays(int cells, int trials, std::uint64_t seed) {
  const int K = cells;
  if (K < 2) throw std::invalid_argument("verify_symmetric_delays needs K >= 2");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");

  // Gaps are drawn positive and rescaled to a fixed total of 0.9 so every
  // trial's group matrix is well conditioned and traces are comparable.
  constexpr double kGapTotal = 0.9;

  SymmetryReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  RngStream rng(seed, RngStream::derive({0x5Eu}));
  for (int t = 0; t < trials; ++t) {
    SymmetryTrial trial;
    trial.deltas.resize(K - 1);
    double total = 0.0;
    for (double& d : trial.deltas) {
      d = 0.05 + rng.uniform();
      total += d;
    }
    for (double& d : trial.deltas) d *= kGapTotal / total;

    const Matrix A = group_A(trial.deltas);
    const Matrix J = exchange_matrix(K);
    const Matrix sym = 0.5 * (A + J * A * J);
    trial.trace_A_inv = trace_inverse_pd(A, "verify_symmetric_delays");
    trial.trace_symmetrized_inv = trace_inverse_pd(sym, "verify_symmetric_delays");

    const double violation = trial.trace_symmetrized_inv - trial.trace_A_inv;
    report.max_violation = std::max(report.max_violation, violation);
    if (violation > 1e-12) report.all_hold = false;

    double asym = 0.0;
    for (int i = 0; i < K - 1; ++i)
      asym = std::max(asym, std::abs(trial.deltas[i] - trial.deltas[K - 2 - i]));
    if (asym > 1e-9) report.min_margin = std::min(report.min_margin, -violation);
    report.trials.push_back(std::move(trial));
  }
  return report;
}

EigenSplit centrosymmetric_eigensplit(const Matrix& A, double tol) {
  const int K = static_cast<int>(A.rows());
  if (K % 2 == 0) throw std::invalid_argument("eigensplit requires odd dimension");
  const Matrix J = exchange_matrix(K);
  if ((J * A * J - A).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("matrix is not centrosymmetric within tolerance");

  const int m = (K - 1) / 2;
  const Matrix B = A.topLeftCorner(m, m);
  const Matrix C = A.bottomLeftCorner(m, m);
  const Eigen::VectorXd x = A.block(0, m, m, 1);
  const double q = A(m, m);
  const Matrix Jm = exchange_matrix(m);

  EigenSplit split;
  if (m > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es1(B - Jm * C, Eigen::EigenvaluesOnly);
    split.lambda_difference = es1.eigenvalues();
  } else {
    split.lambda_difference = Eigen::VectorXd();
  }

  Matrix bordered(m + 1, m + 1);
  bordered.topLeftCorner(m, m) = B + Jm * C;
  bordered.block(0, m, m, 1) = std::sqrt(2.0) * x;
  bordered.block(m, 0, 1, m) = std::sqrt(2.0) * x.transpose();
  bordered(m, m) = q;
  Eigen::SelfAdjointEigenSolver<Matrix> es2(bordered, Eigen::EigenvaluesOnly);
  split.lambda_bordered = es2.eigenvalues();
  return split;
}

}  // namespace asyncpilot
