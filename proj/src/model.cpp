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

#include "asyncpilot/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace asyncpilot {

void SystemConfig::validate() const {
  if (cells < 1) throw std::invalid_argument("cells must be >= 1");
  if (users_per_cell < 1) throw std::invalid_argument("users_per_cell must be >= 1");
  if (antennas < 1) throw std::invalid_argument("antennas must be >= 1");
  if (!(symbol_duration > 0.0)) throw std::invalid_argument("symbol_duration must be > 0");
  if (!(snr > 0.0)) throw std::invalid_argument("snr must be > 0");
}

DelaySchedule::DelaySchedule(int cells, int users_per_cell, double symbol_duration,
                             std::vector<double> taus_flat)
    : cells_(cells), users_(users_per_cell), T_(symbol_duration), tau_(std::move(taus_flat)) {
  if (cells_ < 1 || users_ < 1 || !(T_ > 0.0))
    throw std::invalid_argument("invalid schedule dimensions");
  if (static_cast<int>(tau_.size()) != cells_ * users_)
    throw std::invalid_argument("schedule needs exactly K*N delays");
  for (double t : tau_)
    if (!(t >= 0.0) || !(t <= T_))
      throw std::domain_error("delay outside [0, T]: " + std::to_string(t));
}

DelaySchedule DelaySchedule::synchronous(int cells, int users_per_cell, double symbol_duration) {
  return DelaySchedule(cells, users_per_cell, symbol_duration,
                       std::vector<double>(static_cast<size_t>(cells) * users_per_cell, 0.0));
}

DelaySchedule DelaySchedule::from_function(int cells, int users_per_cell, double symbol_duration,
                                           const std::function<double(int, int)>& f) {
  std::vector<double> taus(static_cast<size_t>(cells) * users_per_cell);
  for (int k = 0; k < cells; ++k)
    for (int n = 0; n < users_per_cell; ++n) taus[static_cast<size_t>(k) * users_per_cell + n] = f(k, n);
  return DelaySchedule(cells, users_per_cell, symbol_duration, std::move(taus));
}

std::vector<int> DelaySchedule::sorted_indices() const {
  std::vector<int> idx(tau_.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [this](int a, int b) {
    if (tau_[a] != tau_[b]) return tau_[a] < tau_[b];
    const UeIndex ua = ue_of(a), ub = ue_of(b);
    if (ua.user != ub.user) return ua.user < ub.user;
    return ua.cell < ub.cell;
  });
  return idx;
}

OverlapCoeffs overlap_coeffs(double tau1, double tau2, double symbol_duration) {
  if (!(symbol_duration > 0.0)) throw std::domain_error("symbol duration must be > 0");
  if (!(tau1 >= 0.0) || !(tau1 <= symbol_duration) || !(tau2 >= 0.0) ||
      !(tau2 <= symbol_duration))
    throw std::domain_error("delays must lie in [0, T]");
  const double shifted = std::abs(tau1 - tau2) / symbol_duration;
  return {1.0 - shifted, shifted};
}

PilotMatrix build_pilots(const SystemConfig& config) {
  config.validate();
  const int N = config.users_per_cell;
  const int L = config.pilot_len();
  const int NK = config.n_ues();

  PilotMatrix p;
  p.kind = config.pilot_kind;
  p.rows = CMatrix::Zero(N, L);
  if (config.pilot_kind == PilotKind::Identity) {
    for (int n = 0; n < N; ++n) p.rows(n, n) = 1.0;
  } else {
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    for (int n = 0; n < N; ++n)
      for (int m = 0; m < L; ++m) {
        const double phase = -2.0 * M_PI * n * m / N;
        p.rows(n, m) = scale * Complex(std::cos(phase), std::sin(phase));
      }
  }
  p.full = CMatrix::Zero(NK, static_cast<Eigen::Index>(NK) * L);
  for (int r = 0; r < NK; ++r) p.full.block(r, static_cast<Eigen::Index>(r) * L, 1, L) = p.rows.row(r % N);
  return p;
}

Eigen::RowVectorXcd shift_pilot(const Eigen::RowVectorXcd& p, int direction) {
  const Eigen::Index L = p.size();
  Eigen::RowVectorXcd out = Eigen::RowVectorXcd::Zero(L);
  if (direction > 0) {
    out.head(L - 1) = p.tail(L - 1);
  } else if (direction < 0) {
    out.tail(L - 1) = p.head(L - 1);
  } else {
    out = p;
  }
  return out;
}

Matrix build_R_P(const DelaySchedule& schedule, const SystemConfig& config) {
  const int NK = config.n_ues();
  const int L = config.pilot_len();
  const double T = config.symbol_duration;
  Matrix R_P = Matrix::Zero(static_cast<Eigen::Index>(NK) * L, static_cast<Eigen::Index>(NK) * L);

  for (int r = 0; r < NK; ++r) {
    for (int t = 0; t < NK; ++t) {
      auto block = R_P.block(static_cast<Eigen::Index>(r) * L, static_cast<Eigen::Index>(t) * L, L, L);
      const double tr = schedule.tau_flat(r);
      const double tt = schedule.tau_flat(t);
      const auto [direct, shifted] = overlap_coeffs(tr, tt, T);
      block.diagonal().setConstant(r == t ? 1.0 : direct);
      if (r == t || tr == tt) continue;
      if (tr < tt) {
        for (int i = 0; i + 1 < L; ++i) block(i + 1, i) = shifted;
      } else {
        for (int i = 0; i + 1 < L; ++i) block(i, i + 1) = shifted;
      }
    }
  }
  return R_P;
}

CMatrix build_R(const DelaySchedule& schedule, const PilotMatrix& pilots,
                const SystemConfig& config) {
  const int NK = config.n_ues();
  const int L = config.pilot_len();
  const int N = config.users_per_cell;
  const double T = config.symbol_duration;
  CMatrix R = CMatrix::Zero(NK, static_cast<Eigen::Index>(NK) * L);

  // Row r = signal of user r; column block t = sampler synchronized to user t.
  for (int r = 0; r < NK; ++r) {
    const Eigen::RowVectorXcd p = pilots.pilot(r % N);
    for (int t = 0; t < NK; ++t) {
      auto block = R.block(r, static_cast<Eigen::Index>(t) * L, 1, L);
      const double tr = schedule.tau_flat(r);
      const double tt = schedule.tau_flat(t);
      if (r == t || tr == tt) {
        block = p;
        continue;
      }
      const auto [direct, shifted] = overlap_coeffs(tr, tt, T);
      block = direct * p + shifted * shift_pilot(p, tt > tr ? +1 : -1);
    }
  }
  return R;
}

CMatrix build_A(const PilotMatrix& pilots, const Matrix& R_P, const SystemConfig& config) {
  (void)config;
  return pilots.full * R_P * pilots.full.adjoint();
}

EigenExtremes hermitian_eigen_extremes(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

TrainingMatrices make_training_matrices(const DelaySchedule& schedule,
                                        const SystemConfig& config) {
  TrainingMatrices tm;
  tm.pilots = build_pilots(config);
  tm.R_P = build_R_P(schedule, config);
  tm.R = build_R(schedule, tm.pilots, config);
  tm.A = build_A(tm.pilots, tm.R_P, config);
  const EigenExtremes ex = hermitian_eigen_extremes(tm.A);
  tm.a_eigen_min = ex.min;
  tm.a_eigen_max = ex.max;
  return tm;
}

std::vector<std::pair<UeIndex, UeIndex>> detect_duplicate_delays(const DelaySchedule& schedule,
                                                                 double tol) {
  if (tol < 0.0) throw std::invalid_argument("tolerance must be >= 0");
  std::vector<std::pair<UeIndex, UeIndex>> out;
  const int n = schedule.size();
  const double abs_tol = tol * schedule.symbol_duration();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (std::abs(schedule.tau_flat(a) - schedule.tau_flat(b)) <= abs_tol)
        out.emplace_back(schedule.ue_of(a), schedule.ue_of(b));
  return out;
}

}  // namespace asyncpilot
