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

#include "asyncpilot/verification.hpp"

#include "asyncpilot/delay_schemes.hpp"
#include "asyncpilot/estimators.hpp"
#include "asyncpilot/model.hpp"
#include "asyncpilot/montecarlo.hpp"
#include "asyncpilot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace asyncpilot {

namespace {

SystemConfig config_for(int K, int N, double gamma = 1.0,
                        PilotKind kind = PilotKind::Identity) {
  SystemConfig c;
  c.cells = K;
  c.users_per_cell = N;
  c.antennas = 1;
  c.snr = gamma;
  c.pilot_kind = kind;
  return c;
}

DelaySchedule random_distinct_schedule(int K, int N, RngStream& rng) {
  std::vector<double> taus(static_cast<size_t>(K) * N);
  for (double& t : taus) t = rng.uniform();
  return DelaySchedule(K, N, 1.0, std::move(taus));
}

// Overlap of the matched-filter windows of sampler symbol (a, i) and sampler
// symbol (b, j), computed from first principles as the intersection length of
// the two unit windows. Independent route to the banded block construction.
Matrix noise_covariance_from_windows(const DelaySchedule& schedule, int L) {
  const int n = schedule.size();
  const double T = schedule.symbol_duration();
  Matrix cov(n * L, n * L);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < L; ++i)
      for (int b = 0; b < n; ++b)
        for (int j = 0; j < L; ++j) {
          const double sa = i * T + schedule.tau_flat(a);
          const double sb = j * T + schedule.tau_flat(b);
          const double overlap = std::max(0.0, std::min(sa, sb) + T - std::max(sa, sb));
          cov(a * L + i, b * L + j) = overlap / T;
        }
  return cov;
}

struct CheckBuilder {
  CheckResult r;
  explicit CheckBuilder(std::string name) { r.name = std::move(name); }
  CheckResult done(bool pass, double residual, std::string detail) {
    r.pass = pass;
    r.residual = residual;
    r.detail = std::move(detail);
    return r;
  }
};

CheckResult check_gram_definiteness(std::uint64_t seed, bool bound_side) {
  CheckBuilder c(bound_side ? "zf_mse_upper_bound" : "gram_positive_definite");
  RngStream rng(seed, RngStream::derive({11}));
  double min_lambda = std::numeric_limits<double>::infinity();
  double min_bound_margin = std::numeric_limits<double>::infinity();
  const int kn_pairs[][2] = {{2, 1}, {3, 1}, {4, 1}, {2, 2}, {3, 2}, {4, 2}, {2, 3}, {3, 3}};
  for (int t = 0; t < 200; ++t) {
    const auto [K, N] = std::pair(kn_pairs[t % 8][0], kn_pairs[t % 8][1]);
    const SystemConfig cfg = config_for(K, N);
    const DelaySchedule sched = random_distinct_schedule(K, N, rng);
    const TrainingMatrices tm = make_training_matrices(sched, cfg);
    min_lambda = std::min(min_lambda, tm.a_eigen_min);
    if (bound_side) {
      const double mse = analytic_mse_zf(tm.pilots, tm.R_P, cfg.snr);
      const double bound = zf_mse_upper_bound(tm.A, cfg.snr);
      min_bound_margin = std::min(min_bound_margin, bound - mse);
    }
  }
  if (bound_side)
    return c.done(min_bound_margin >= 0.0, min_bound_margin,
                  "min(bound - mse) over 200 random schedules");
  return c.done(min_lambda > 0.0, min_lambda, "min lambda_min(A) over 200 random schedules");
}

CheckResult check_group_orthogonality() {
  CheckBuilder c("equally_divided_group_orthogonality");
  double worst = 0.0;
  for (int K = 2; K <= 7; ++K)
    for (int N = 1; N <= 4; ++N) {
      const SystemConfig cfg = config_for(K, N);
      const DelaySchedule sched = equally_divided_schedule(K, N);
      const auto report = check_interference_free(sched, build_pilots(cfg));
      for (const auto& v : report.violations) worst = std::max(worst, v.magnitude);
      if (!report.interference_free)
        return c.done(false, worst, "cross-group entry found for K=" + std::to_string(K) +
                                        " N=" + std::to_string(N));
    }
  return c.done(true, worst, "max cross-group |A| entry, K=2..7, N=1..4");
}

CheckResult check_ordering_violation() {
  CheckBuilder c("group_ordering_violation");
  // Group-2 user earlier than a group-1 user by 0.2: the adjacent-pilot entry
  // must be visibly nonzero.
  const SystemConfig cfg = config_for(2, 2);
  const DelaySchedule sched(2, 2, 1.0, {0.3, 0.1, 0.35, 0.8});
  const auto report = check_interference_free(sched, build_pilots(cfg));
  double worst = 0.0;
  for (const auto& v : report.violations) worst = std::max(worst, v.magnitude);
  return c.done(!report.interference_free && worst > 0.01, worst,
                "largest cross-group entry under an ordering violation");
}

CheckResult check_closed_form_inverse(double perturb_mu) {
  CheckBuilder c("closed_form_group_inverse");
  double worst = 0.0;
  for (int K = 2; K <= 7; ++K) {
    for (int s = 1; s <= 50; ++s) {
      const double dp = (static_cast<double>(s) / 50.0) / (K - 1);
      const Matrix closed = inverse_A_closed_form_perturbed(K, dp, perturb_mu);
      const Matrix A = group_A(std::vector<double>(K - 1, dp));
      const Matrix numeric = A.fullPivLu().inverse();
      worst = std::max(worst, (closed - numeric).cwiseAbs().maxCoeff());
    }
  }
  return c.done(worst < 1e-9, worst, "max |closed-form - numeric| over K=2..7, 50 gaps each");
}

CheckResult check_total_mse() {
  CheckBuilder c("total_mse_closed_form");
  double worst = 0.0;
  for (int K = 2; K <= 7; ++K)
    for (int N = 1; N <= 4; ++N)
      for (double gamma : {1.0, 100.0}) {
        const SystemConfig cfg = config_for(K, N, gamma);
        const TrainingMatrices tm = make_training_matrices(equally_divided_schedule(K, N), cfg);
        const double mse = analytic_mse_zf(tm.pilots, tm.R_P, gamma);
        const double closed = total_mse_closed_form(K, N, gamma);
        worst = std::max(worst, std::abs(mse / closed - 1.0));
      }
  return c.done(worst < 1e-9, worst, "max relative error, K=2..7, N=1..4, gamma in {1,100}");
}

CheckResult check_noise_covariance() {
  CheckBuilder c("noise_covariance_window_overlap");
  RngStream rng(1234, RngStream::derive({12}));
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int K = 2 + static_cast<int>(rng.next_u64() % 3);  // 2..4
    const int N = 1 + static_cast<int>(rng.next_u64() % 3);  // 1..3
    const SystemConfig cfg = config_for(K, N);
    const DelaySchedule sched = random_distinct_schedule(K, N, rng);
    const Matrix R_P = build_R_P(sched, cfg);
    const Matrix oracle = noise_covariance_from_windows(sched, cfg.pilot_len());
    worst = std::max(worst, (R_P - oracle).cwiseAbs().maxCoeff());
  }
  return c.done(worst < 1e-12, worst, "max |R_P - window overlap| over 100 random schedules");
}

CheckResult check_convexity(std::uint64_t seed) {
  CheckBuilder c("trace_blend_convexity");
  RngStream rng(seed, RngStream::derive({13}));
  double min_second_diff = std::numeric_limits<double>::infinity();
  double worst_endpoint_gap = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int K = 3 + t % 5;  // 3..7
    std::vector<double> deltas(K - 1);
    double total = 0.0, asym = 0.0;
    do {
      total = 0.0;
      for (double& d : deltas) {
        d = 0.05 + rng.uniform();
        total += d;
      }
      for (double& d : deltas) d *= 0.9 / total;
      asym = 0.0;
      for (int i = 0; i < K - 1; ++i)
        asym = std::max(asym, std::abs(deltas[i] - deltas[K - 2 - i]));
    } while (asym < 1e-3);  // keep A distinct from JAJ
    const ConvexityReport rep = verify_convexity(group_A(deltas), 49);
    min_second_diff = std::min(min_second_diff, rep.min_second_difference);
    worst_endpoint_gap = std::max(worst_endpoint_gap, std::abs(rep.f0 - rep.f1));
    if (rep.f_half > rep.f0)
      return c.done(false, rep.f_half - rep.f0, "f(1/2) exceeded f(0)");
  }
  const bool pass = min_second_diff > 0.0 && worst_endpoint_gap < 1e-10;
  return c.done(pass, min_second_diff, "min f'' proxy over 50 non-centrosymmetric matrices");
}

CheckResult check_symmetrization(std::uint64_t seed) {
  CheckBuilder c("symmetrized_trace_inequality");
  double worst = -std::numeric_limits<double>::infinity();
  for (int K = 4; K <= 7; ++K) {
    const SymmetryReport rep = verify_symmetric_delays(K, 25, seed + K);
    if (!rep.all_hold) return c.done(false, rep.max_violation, "inequality violated");
    worst = std::max(worst, rep.max_violation);
  }
  // Equality at a symmetric gap vector.
  const std::vector<double> sym = {0.25, 0.4, 0.25};
  const Matrix A = group_A(sym);
  const Matrix J = exchange_matrix(4);
  const double plain = A.fullPivLu().inverse().trace();
  const double symmetrized = (0.5 * (A + J * A * J)).fullPivLu().inverse().trace();
  const double eq_residual = std::abs(plain - symmetrized);
  return c.done(eq_residual < 1e-12, std::max(worst, eq_residual),
                "100 random trials (K=4..7) + symmetric-gap equality");
}

CheckResult check_eigensplit() {
  CheckBuilder c("centrosymmetric_eigensplit");
  double worst = 0.0;
  for (int K : {3, 5, 7}) {
    const double dp = 1.0 / (K - 1);
    const Matrix A = group_A(std::vector<double>(K - 1, dp));
    const EigenSplit split = centrosymmetric_eigensplit(A);
    Eigen::VectorXd merged(K);
    merged << split.lambda_difference, split.lambda_bordered;
    std::sort(merged.data(), merged.data() + merged.size());
    Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
    worst = std::max(worst, (merged - es.eigenvalues()).cwiseAbs().maxCoeff());
  }
  return c.done(worst < 1e-9, worst, "max |split spectrum - direct spectrum|, K in {3,5,7}");
}

CheckResult check_grid_search_optimum(int max_cells, int jobs) {
  CheckBuilder c("grid_search_equal_gap_optimum");
  double worst = 0.0;
  for (int K = 2; K <= max_cells; ++K) {
    SystemConfig cfg = config_for(K, 1);
    SearchSpec spec;
    spec.grid_step = 0.05;
    spec.jobs = jobs;
    const SearchResult result = exhaustive_search(cfg, spec);
    std::vector<double> sorted = result.best.taus();
    std::sort(sorted.begin(), sorted.end());
    for (int j = 0; j < K; ++j) {
      const double ideal = static_cast<double>(j) / (K - 1);
      worst = std::max(worst, std::abs(sorted[j] - ideal));
    }
  }
  const bool pass = worst <= 0.05 + 1e-12;
  return c.done(pass, worst,
                "max grid-optimum coordinate deviation from equal spacing, K=2.." +
                    std::to_string(max_cells));
}

CheckResult check_group_balance() {
  CheckBuilder c("equal_group_width_balance");
  double min_margin = std::numeric_limits<double>::infinity();
  for (int K = 2; K <= 7; ++K) {
    const double balanced = group_mse_closed_form(K, 0.5, 1.0);
    for (int s = 1; s <= 19; ++s) {
      const double w = 0.05 * s;
      const double mean = 0.5 * (group_mse_closed_form(K, w, 1.0) +
                                 group_mse_closed_form(K, 1.0 - w, 1.0));
      min_margin = std::min(min_margin, mean - balanced);
    }
  }
  return c.done(min_margin >= -1e-12, min_margin,
                "min(mean group MSE - balanced MSE) over width splits, N=2");
}

CheckResult check_duplicate_degeneracy() {
  CheckBuilder c("duplicate_delay_degeneracy");
  const SystemConfig cfg = config_for(3, 2);
  DelaySchedule base = equally_divided_schedule(3, 2);
  std::vector<double> taus = base.taus();
  // Collide cells 0 and 1 of pilot group 0.
  taus[base.flat_index(1, 0)] = taus[base.flat_index(0, 0)];
  const DelaySchedule degenerate(3, 2, 1.0, taus);
  const TrainingMatrices tm = make_training_matrices(degenerate, cfg);
  const double det = std::abs(tm.A.fullPivLu().determinant());
  return c.done(det < 1e-12, det, "|det A| after duplicating one delay within a pilot group");
}

CheckResult check_estimator_montecarlo(int jobs) {
  CheckBuilder c("estimator_montecarlo_consistency");
  SystemConfig cfg = config_for(2, 2, 1.0);
  cfg.antennas = 64;
  const DelaySchedule sched = equally_divided_schedule(2, 2);
  double worst = 0.0;
  for (EstimatorKind kind : {EstimatorKind::Zf, EstimatorKind::Lmmse}) {
    const double emp = empirical_mse(cfg, sched, kind, 1000, 515, jobs);
    const double ana = analytic_mse_reference(cfg, sched, kind);
    worst = std::max(worst, std::abs(emp / ana - 1.0));
  }
  return c.done(worst < 0.05, worst, "max |empirical/analytic - 1| at M=64, 1000 trials");
}

}  // namespace

std::vector<CheckResult> run_verification(VerifyLevel level, const VerifyOptions& options) {
  std::vector<CheckResult> results;
  results.push_back(check_gram_definiteness(options.seed, false));
  results.push_back(check_gram_definiteness(options.seed, true));
  results.push_back(check_group_orthogonality());
  results.push_back(check_ordering_violation());
  results.push_back(check_closed_form_inverse(options.perturb_mu));
  results.push_back(check_total_mse());
  results.push_back(check_noise_covariance());
  results.push_back(check_convexity(options.seed));
  results.push_back(check_symmetrization(options.seed));
  results.push_back(check_eigensplit());
  results.push_back(
      check_grid_search_optimum(level == VerifyLevel::Full ? 4 : 3, options.jobs));
  results.push_back(check_group_balance());
  results.push_back(check_duplicate_degeneracy());
  if (level == VerifyLevel::Full) results.push_back(check_estimator_montecarlo(options.jobs));
  return results;
}

bool print_verification_report(const std::vector<CheckResult>& results, std::ostream& out) {
  bool all = true;
  for (const CheckResult& r : results) {
    out << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  residual=" << r.residual;
    if (!r.detail.empty()) out << "  (" << r.detail << ")";
    out << "\n";
    all = all && r.pass;
  }
  out << (all ? "all checks passed" : "VERIFICATION FAILED") << "\n";
  return all;
}

}  // namespace asyncpilot
