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
// Linear channel estimators for the oversampled training observation
// Y = sqrt(gamma) H R + W and their analytic mean-square errors. Estimates are
// formed as H_hat = Y * X; the LMMSE weight uses the correlated-noise compact
// form and stays well defined even when the pilot Gram matrix A is singular,
// while the ZF weight requires invertible A and reports pilot contamination
// otherwise.

#ifndef ASYNCPILOT_ESTIMATORS_HPP
#define ASYNCPILOT_ESTIMATORS_HPP

#include "asyncpilot/model.hpp"

namespace asyncpilot {

// Relative eigenvalue tolerance below which A counts as singular.
inline constexpr double kSingularRelTol = 1e-10;

// Diagonal channel covariance profile: one variance per user, flat order.
// A base station sees its own users at unit variance and other-cell users at
// a reduced cross-cell variance.
class ChannelProfile {
 public:
  ChannelProfile(int cells, int users_per_cell, std::vector<double> sigma2_flat);

  static ChannelProfile uniform(const SystemConfig& config, double sigma2 = 1.0);
  static ChannelProfile multi_cell(const SystemConfig& config, int serving_cell,
                                   double serving_sigma2 = 1.0, double other_sigma2 = 0.5);

  int size() const { return static_cast<int>(sigma2_.size()); }
  double sigma2(int k, int n) const { return sigma2_[static_cast<size_t>(k) * users_ + n]; }
  double sigma2_flat(int flat) const { return sigma2_[flat]; }
  const std::vector<double>& variances() const { return sigma2_; }
  Matrix R_HH() const;  // diagonal NK x NK

 private:
  int users_;
  std::vector<double> sigma2_;
};

enum class EstimatorKind { Lmmse, Zf };

struct EstimatorMatrix {
  CMatrix X;  // (NK*L) x NK for the oversampled observation
  EstimatorKind kind = EstimatorKind::Lmmse;
};

// LMMSE weight X = sqrt(gamma) P^H (gamma P R_P P^H + R_HH^{-1})^{-1}.
// The inner matrix is Hermitian positive definite for any schedule.
EstimatorMatrix lmmse_matrix(const PilotMatrix& pilots, const Matrix& R_P,
                             const ChannelProfile& profile, double gamma);

// LMMSE weight for a white-noise observation Y = sqrt(gamma) H R + W with
// E[W^H W]/M = I: X = sqrt(gamma) R^H (gamma R R^H + R_HH^{-1})^{-1}.
// Used by the single-sample (no-oversampling) training baselines.
CMatrix lmmse_matrix_white(const CMatrix& R, const ChannelProfile& profile, double gamma);

// ZF weight X = sqrt(gamma) P^H (gamma A)^{-1} with A = P R_P P^H.
// Throws SingularPilotSystem when A is singular within kSingularRelTol.
EstimatorMatrix zf_matrix(const PilotMatrix& pilots, const Matrix& R_P, double gamma);

// H_hat = Y * X. Throws std::invalid_argument on dimension mismatch.
CMatrix estimate(const CMatrix& Y, const EstimatorMatrix& X);

// Analytic MSE of the LMMSE estimate, E||H_hat - H||_F^2 / (KNM):
//   (1/(KN*gamma)) tr[(P R_P P^H + (1/gamma) R_HH^{-1})^{-1}].
double analytic_mse_lmmse(const PilotMatrix& pilots, const Matrix& R_P,
                          const ChannelProfile& profile, double gamma);

// Analytic MSE of the ZF estimate: (1/(KN*gamma)) tr[(P R_P P^H)^{-1}].
// Throws SingularPilotSystem when A is singular.
double analytic_mse_zf(const PilotMatrix& pilots, const Matrix& R_P, double gamma);

// Upper bound 1/(gamma * lambda_min(A)) on the ZF MSE.
// Throws SingularPilotSystem when lambda_min is not positive within tolerance.
double zf_mse_upper_bound(const CMatrix& A, double gamma);

}  // namespace asyncpilot

#endif
