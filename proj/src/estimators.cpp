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

#include "asyncpilot/estimators.hpp"

#include "asyncpilot/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace asyncpilot {

ChannelProfile::ChannelProfile(int cells, int users_per_cell, std::vector<double> sigma2_flat)
    : users_(users_per_cell), sigma2_(std::move(sigma2_flat)) {
  if (static_cast<int>(sigma2_.size()) != cells * users_per_cell)
    throw std::invalid_argument("profile needs K*N variances");
  for (double s : sigma2_)
    if (!(s >= 0.0)) throw std::invalid_argument("channel variances must be >= 0");
}

ChannelProfile ChannelProfile::uniform(const SystemConfig& config, double sigma2) {
  return ChannelProfile(config.cells, config.users_per_cell,
                        std::vector<double>(static_cast<size_t>(config.n_ues()), sigma2));
}

ChannelProfile ChannelProfile::multi_cell(const SystemConfig& config, int serving_cell,
                                          double serving_sigma2, double other_sigma2) {
  std::vector<double> s(static_cast<size_t>(config.n_ues()));
  for (int k = 0; k < config.cells; ++k)
    for (int n = 0; n < config.users_per_cell; ++n)
      s[static_cast<size_t>(k) * config.users_per_cell + n] =
          (k == serving_cell) ? serving_sigma2 : other_sigma2;
  return ChannelProfile(config.cells, config.users_per_cell, std::move(s));
}

Matrix ChannelProfile::R_HH() const {
  Matrix d = Matrix::Zero(size(), size());
  for (int i = 0; i < size(); ++i) d(i, i) = sigma2_[i];
  return d;
}

namespace {

CMatrix gram_matrix(const PilotMatrix& pilots, const Matrix& R_P) {
  return pilots.full * R_P * pilots.full.adjoint();
}

void check_positive_variances(const ChannelProfile& profile) {
  for (int i = 0; i < profile.size(); ++i)
    if (!(profile.sigma2_flat(i) > 0.0))
      throw std::invalid_argument("LMMSE requires strictly positive channel variances");
}

void check_invertible(const CMatrix& A, const char* who) {
  const EigenExtremes ex = hermitian_eigen_extremes(A);
  if (!(ex.min > kSingularRelTol * ex.max))
    throw SingularPilotSystem(std::string(who) +
                              ": pilot Gram matrix is singular (pilot contamination), "
                              "lambda_min = " +
                              std::to_string(ex.min));
}

}  // namespace

EstimatorMatrix lmmse_matrix(const PilotMatrix& pilots, const Matrix& R_P,
                             const ChannelProfile& profile, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  check_positive_variances(profile);
  const CMatrix A = gram_matrix(pilots, R_P);
  CMatrix inner = gamma * A;
  for (int i = 0; i < inner.rows(); ++i) inner(i, i) += 1.0 / profile.sigma2_flat(i);
  // inner = gamma*A + R_HH^{-1} is Hermitian PD regardless of A's rank.
  const CMatrix X = std::sqrt(gamma) * inner.llt().solve(pilots.full).adjoint();
  return {X, EstimatorKind::Lmmse};
}

CMatrix lmmse_matrix_white(const CMatrix& R, const ChannelProfile& profile, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  check_positive_variances(profile);
  CMatrix inner = gamma * (R * R.adjoint());
  for (int i = 0; i < inner.rows(); ++i) inner(i, i) += 1.0 / profile.sigma2_flat(i);
  return std::sqrt(gamma) * inner.llt().solve(R).adjoint();
}

EstimatorMatrix zf_matrix(const PilotMatrix& pilots, const Matrix& R_P, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  const CMatrix A = gram_matrix(pilots, R_P);
  check_invertible(A, "zf_matrix");
  const CMatrix X = std::sqrt(gamma) * (gamma * A).llt().solve(pilots.full).adjoint();
  return {X, EstimatorKind::Zf};
}

CMatrix estimate(const CMatrix& Y, const EstimatorMatrix& X) {
  if (Y.cols() != X.X.rows())
    throw std::invalid_argument("estimate: observation has " + std::to_string(Y.cols()) +
                                " columns but estimator expects " + std::to_string(X.X.rows()));
  return Y * X.X;
}

double analytic_mse_lmmse(const PilotMatrix& pilots, const Matrix& R_P,
                          const ChannelProfile& profile, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  check_positive_variances(profile);
  CMatrix inner = gram_matrix(pilots, R_P);
  for (int i = 0; i < inner.rows(); ++i) inner(i, i) += 1.0 / (gamma * profile.sigma2_flat(i));
  const int dim = static_cast<int>(inner.rows());
  const CMatrix inv = inner.ldlt().solve(CMatrix::Identity(dim, dim));
  return inv.trace().real() / (dim * gamma);
}

double analytic_mse_zf(const PilotMatrix& pilots, const Matrix& R_P, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  const CMatrix A = gram_matrix(pilots, R_P);
  check_invertible(A, "analytic_mse_zf");
  const int dim = static_cast<int>(A.rows());
  const CMatrix inv = A.ldlt().solve(CMatrix::Identity(dim, dim));
  return inv.trace().real() / (dim * gamma);
}

double zf_mse_upper_bound(const CMatrix& A, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  const EigenExtremes ex = hermitian_eigen_extremes(A);
  if (!(ex.min > kSingularRelTol * ex.max))
    throw SingularPilotSystem("zf_mse_upper_bound: lambda_min not positive");
  return 1.0 / (gamma * ex.min);
}

}  // namespace asyncpilot
