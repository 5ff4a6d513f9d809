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
//
// Delay-schedule design and evaluation. The centerpiece is the equally-divided
// scheme: pilot group i (users sharing pilot i) occupies the sub-interval
// [(i-1)T/N, iT/N] and its K members are spaced uniformly inside it, which for
// identity pilots keeps pilot groups interference-free and minimizes the ZF
// estimation MSE for 2 <= K <= 7. Closed forms for the group Gram matrix, its
// inverse and the resulting MSE are provided, together with numerical
// verification helpers (convexity of the trace blend, symmetrized-trace
// inequality, centrosymmetric eigenvalue split) and an exhaustive grid search.

#ifndef ASYNCPILOT_DELAY_SCHEMES_HPP
#define ASYNCPILOT_DELAY_SCHEMES_HPP

#include "asyncpilot/model.hpp"

#include <cstdint>
#include <optional>

namespace asyncpilot {

// Cell range for which equal spacing is provably MSE-optimal.
inline constexpr int kProvenCellsMin = 2;
inline constexpr int kProvenCellsMax = 7;
inline bool within_proven_cell_range(int cells) {
  return cells >= kProvenCellsMin && cells <= kProvenCellsMax;
}

// Partition of [0, T] into the N pilot-group sub-intervals.
struct GroupLayout {
  std::vector<double> boundaries;  // theta_0 .. theta_N, nondecreasing, ends at {0, T}
  double symbol_duration = 1.0;

  static GroupLayout uniform(int groups, double symbol_duration = 1.0);
  int groups() const { return static_cast<int>(boundaries.size()) - 1; }
  double width(int i) const { return boundaries[i + 1] - boundaries[i]; }
  void validate() const;
};

// Equally spaced delays inside each group interval: user (cell j, pilot i)
// gets tau = (i + j/(K-1)) * T/N (0-based i, j). For K = 1 the single user of
// each group sits at the left group boundary.
DelaySchedule equally_divided_schedule(int cells, int users_per_cell,
                                       double symbol_duration = 1.0);

// General form: group i's K users spaced uniformly over [theta_i, theta_{i+1}].
DelaySchedule schedule_from_layout(const GroupLayout& layout, int cells);

// Cross-group interference report for identity pilots: entry (r,t) of A with
// differing pilot indices, listed when its magnitude exceeds `tol`.
struct CrossEntry {
  int row;
  int col;
  double magnitude;
};
struct InterferenceReport {
  bool interference_free = true;
  std::vector<CrossEntry> violations;
};

// True iff every cross-group entry of A vanishes (|.| < tol); equivalent to
// the delay-ordering condition tau(k1,n1) <= tau(k2,n2) for adjacent pilot
// indices n1 < n2. Requires identity pilots.
InterferenceReport check_interference_free(const DelaySchedule& schedule,
                                           const PilotMatrix& pilots, double tol = 1e-12);

// Group Gram matrix of one pilot group from consecutive normalized delay gaps
// delta_1..delta_{K-1}: unit diagonal, entry (a,b) = 1 - sum(delta_a..delta_{b-1}).
Matrix group_A(const std::vector<double>& deltas);

// Closed-form inverse of the equal-gap group matrix group_A(delta', ..., delta'):
// (1/(2 delta')) times the (-1, 2, -1) tridiagonal with end diagonals 1 - mu
// and corner entries -mu, mu = delta' / ((K-1) delta' - 2).
// Domain: 0 < delta' <= 1/(K-1).
Matrix inverse_A_closed_form(int cells, double delta_prime);

// Internal helper exposed for fault-injection in the verification suite:
// same as inverse_A_closed_form but with mu perturbed additively.
Matrix inverse_A_closed_form_perturbed(int cells, double delta_prime, double mu_perturbation);

// ZF MSE of one group whose K users are equally spaced over a width-Delta
// interval: (T/(K gamma)) ((K-1)^2 / Delta + 1/(2T - Delta)).
// Strictly decreasing in Delta on (0, T].
double group_mse_closed_form(int cells, double group_width, double gamma,
                             double symbol_duration = 1.0);

// Minimum total ZF MSE of the equally-divided scheme with identity pilots:
// (N/(K gamma)) ((K-1)^2 + 1/(2N - 1)).
double total_mse_closed_form(int cells, int users_per_cell, double gamma);

// Exhaustive grid search over delay vectors with the first user pinned to 0.
enum class SearchObjective { TraceInvA, AverageRate };

struct SearchSpec {
  double grid_step = 0.05;
  bool fix_first = true;                  // pin tau of flat user 0 to 0
  SearchObjective objective = SearchObjective::TraceInvA;
  std::uint64_t max_evaluations = 10'000'000;
  int jobs = 1;
  // Scores one candidate schedule under the AverageRate objective; supplied by
  // the caller (the Monte Carlo layer) so the search stays objective-agnostic.
  std::function<double(const DelaySchedule&)> rate_evaluator;
};

struct GridRow {
  std::vector<double> delays;  // full flat delay vector
  double objective;            // +inf at singular points under TraceInvA
  bool singular;
};

struct SearchResult {
  DelaySchedule best;
  double best_objective;
  std::uint64_t space_size;
  std::vector<GridRow> table;  // in grid enumeration order
};

// Deterministic: ties resolve to the lexicographically smallest delay vector.
// Throws SearchSpaceTooLarge when the grid exceeds spec.max_evaluations.
SearchResult exhaustive_search(const SystemConfig& config, const SearchSpec& spec);

// Samples f(s) = tr[((1-s)A + s JAJ)^{-1}] on num_points interior points and
// returns the minimum central second difference (> 0 iff strictly convex on
// the sampled grid). For centrosymmetric A the blend is constant.
struct ConvexityReport {
  double min_second_difference;
  double f0;
  double f_half;
  double f1;
  double max_deviation_from_f0;  // over all sampled points
};
ConvexityReport verify_convexity(const Matrix& A, int num_points = 49);

// Random-trial check of the symmetrization inequality
// tr(((A + JAJ)/2)^{-1}) <= tr(A^{-1}), strict unless the gap vector is
// symmetric. Gap vectors are drawn with a fixed total so trials are comparable.
struct SymmetryTrial {
  std::vector<double> deltas;
  double trace_A_inv;
  double trace_symmetrized_inv;
};
struct SymmetryReport {
  bool all_hold = true;
  double max_violation = 0.0;  // max over trials of (sym - plain), <= 0 when holding
  double min_margin = 0.0;     // min over asymmetric trials of (plain - sym)
  std::vector<SymmetryTrial> trials;
};
SymmetryReport verify_symmetric_delays(int cells, int trials, std::uint64_t seed);

// Eigenvalue split of an odd-dimension symmetric centrosymmetric matrix into
// the spectra of B - JC and of the bordered [B + JC, sqrt(2)x; sqrt(2)x^T, q]
// block; their union equals the spectrum of A.
struct EigenSplit {
  Eigen::VectorXd lambda_difference;  // eigenvalues of B - JC
  Eigen::VectorXd lambda_bordered;    // eigenvalues of the bordered block
};
EigenSplit centrosymmetric_eigensplit(const Matrix& A, double tol = 1e-12);

// Exchange (anti-identity) matrix J of size n.
Matrix exchange_matrix(int n);

}  // namespace asyncpilot

#endif
