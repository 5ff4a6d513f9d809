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
// Core training algebra for oversampled asynchronous uplink pilots.
//
// Scenario: K cells, N single-antenna users per cell, M base-station antennas.
// Each user transmits one of N orthogonal pilot sequences of length L = N; the
// n-th user of every cell reuses pilot n. Every signal arrives with its own
// delay tau in [0, T]. The receiver runs one matched filter and samples it at
// every user timing, which yields NK samples per symbol ("oversampling") and,
// for the full pilot phase, an M x (NK*L) observation
//
//   Y = sqrt(gamma) * H * R + W,
//
// where R = P * R_P factors into the block-diagonal pilot matrix P and the
// real overlap-coefficient matrix R_P, and the sampled noise W is correlated
// with covariance R_NN = R_P (unit-power rectangular pulse).
//
// Flattened user index convention, used for rows/columns everywhere:
//   flat r = k*N + n   (0-based cell k, user/pilot n; cell-major).

#ifndef ASYNCPILOT_MODEL_HPP
#define ASYNCPILOT_MODEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace asyncpilot {

using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

enum class PilotKind { Identity, NormalizedDft };

// Scenario scalar record.
struct SystemConfig {
  int cells = 2;              // K
  int users_per_cell = 2;     // N (= number of pilots = pilot length L)
  int antennas = 64;          // M
  double symbol_duration = 1.0;
  double snr = 1.0;           // received SNR, linear
  PilotKind pilot_kind = PilotKind::Identity;

  int pilot_len() const { return users_per_cell; }
  int n_ues() const { return cells * users_per_cell; }
  int n_samples() const { return n_ues() * pilot_len(); }  // NK*L training samples

  // Throws std::invalid_argument on violated invariants.
  void validate() const;
};

// One user position (0-based cell, user-within-cell).
struct UeIndex {
  int cell = 0;
  int user = 0;
  friend bool operator==(const UeIndex&, const UeIndex&) = default;
};

// Per-user delay assignment, tau in [0, T], flat cell-major storage.
class DelaySchedule {
 public:
  DelaySchedule(int cells, int users_per_cell, double symbol_duration,
                std::vector<double> taus_flat);

  static DelaySchedule synchronous(int cells, int users_per_cell, double symbol_duration = 1.0);
  static DelaySchedule from_function(int cells, int users_per_cell, double symbol_duration,
                                     const std::function<double(int k, int n)>& f);

  int cells() const { return cells_; }
  int users_per_cell() const { return users_; }
  double symbol_duration() const { return T_; }
  int size() const { return static_cast<int>(tau_.size()); }

  int flat_index(int k, int n) const { return k * users_ + n; }
  UeIndex ue_of(int flat) const { return {flat / users_, flat % users_}; }

  double tau(int k, int n) const { return tau_[flat_index(k, n)]; }
  double tau_flat(int flat) const { return tau_[flat]; }
  const std::vector<double>& taus() const { return tau_; }

  // Total order over users: ascending delay, ties broken by (user, cell).
  std::vector<int> sorted_indices() const;

 private:
  int cells_;
  int users_;
  double T_;
  std::vector<double> tau_;
};

// Overlap coefficients of two time-shifted unit-power rectangular pulses:
// `direct` is the same-symbol overlap 1 - |tau1 - tau2|/T, `shifted` the
// adjacent-symbol overlap |tau1 - tau2|/T; they always sum to 1. This is the
// single extension point for other pulse shapes.
struct OverlapCoeffs {
  double direct;
  double shifted;
};
OverlapCoeffs overlap_coeffs(double tau1, double tau2, double symbol_duration);

// Orthonormal pilot rows and their block-diagonal arrangement.
struct PilotMatrix {
  PilotKind kind = PilotKind::Identity;
  CMatrix rows;  // N x L, row n = pilot sequence of user n in every cell
  CMatrix full;  // NK x (NK*L) block diagonal; block r holds rows.row(r % N)

  Eigen::RowVectorXcd pilot(int n) const { return rows.row(n); }
};

PilotMatrix build_pilots(const SystemConfig& config);

// Pilot row shifted by one symbol: direction +1 drops the first symbol and
// appends a zero, -1 prepends a zero and drops the last symbol.
Eigen::RowVectorXcd shift_pilot(const Eigen::RowVectorXcd& p, int direction);

// Overlap-coefficient matrix R_P ((NK*L) x (NK*L), symmetric PSD). The (r,t)
// L x L block is the identity for r == t or equal delays, lower-bidiagonal
// (direct on the diagonal, shifted below) when tau_r < tau_t and the transposed
// upper-bidiagonal form when tau_r > tau_t. Equals the training-noise
// covariance R_NN for the unit-power pulse.
Matrix build_R_P(const DelaySchedule& schedule, const SystemConfig& config);

// Coefficient matrix R (NK x NK*L), built entry-wise from the per-sampler
// signal mixtures: block (r,t) = direct * P_{n_r} + shifted * P_{n_r}[sign],
// with the shift sign following the delay order of users r (signal) and t
// (sampler). Satisfies R = P * R_P to machine precision.
CMatrix build_R(const DelaySchedule& schedule, const PilotMatrix& pilots,
                const SystemConfig& config);

// Effective pilot Gram matrix A = P * R_P * P^H (NK x NK, Hermitian, unit
// diagonal). Positive definite whenever all delays are pairwise distinct.
CMatrix build_A(const PilotMatrix& pilots, const Matrix& R_P, const SystemConfig& config);

// The full training-matrix bundle for one schedule.
struct TrainingMatrices {
  PilotMatrix pilots;
  Matrix R_P;
  CMatrix R;
  CMatrix A;
  double a_eigen_min = 0.0;  // smallest eigenvalue of A (reported, not enforced)
  double a_eigen_max = 0.0;

  const Matrix& R_NN() const { return R_P; }  // unit-power pulse
  bool a_singular(double rel_tol = 1e-10) const {
    return a_eigen_min <= rel_tol * a_eigen_max;
  }
};

TrainingMatrices make_training_matrices(const DelaySchedule& schedule,
                                        const SystemConfig& config);

// All pairs of users whose delays coincide within `tol` (absolute, in units
// of T), ordered by flat index pairs. Distinguishes intended synchronous
// degradations from floating-point noise.
std::vector<std::pair<UeIndex, UeIndex>> detect_duplicate_delays(const DelaySchedule& schedule,
                                                                 double tol = 1e-9);

// Extreme eigenvalues of a Hermitian matrix.
struct EigenExtremes {
  double min;
  double max;
};
EigenExtremes hermitian_eigen_extremes(const CMatrix& m);

}  // namespace asyncpilot

#endif
