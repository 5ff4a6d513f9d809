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

#include "asyncpilot/uplink_rate.hpp"

#include <cmath>
#include <stdexcept>

namespace asyncpilot {

Eigen::RowVectorXd interference_vector(int i, double tau_target, double tau_interferer,
                                       int data_block_len, double symbol_duration) {
  const int L = data_block_len;
  if (i <= 1 || i >= L)
    throw std::out_of_range("interference vector is defined for interior symbols 1 < i < L");
  const auto [direct, shifted] = overlap_coeffs(tau_target, tau_interferer, symbol_duration);

  Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(L);
  if (tau_target == tau_interferer) {
    r(i - 1) = 1.0;  // single aligned symbol
  } else if (tau_target > tau_interferer) {
    r(i - 2) = direct;
    r(i - 1) = shifted;
  } else {
    r(i - 1) = direct;
    r(i) = shifted;
  }
  return r;
}

double interference_weight(double tau_target, double tau_interferer, double symbol_duration) {
  const auto [direct, shifted] = overlap_coeffs(tau_target, tau_interferer, symbol_duration);
  return direct * direct + shifted * shifted;
}

double sinr(const CMatrix& H, const CMatrix& H_hat, const DelaySchedule& schedule, double gamma,
            int cell, int user) {
  if (H.rows() != H_hat.rows() || H.cols() != H_hat.cols())
    throw std::invalid_argument("sinr: H and H_hat dimensions differ");
  const int u = schedule.flat_index(cell, user);
  const auto h_hat = H_hat.col(u);
  const auto h = H.col(u);

  const double nh2 = h_hat.squaredNorm();
  if (nh2 == 0.0) return 0.0;

  const double numerator = gamma * nh2 * nh2;
  double denominator = gamma * std::norm(h_hat.dot(h - h_hat)) + nh2;
  const double tau_u = schedule.tau_flat(u);
  for (int v = 0; v < H.cols(); ++v) {
    if (v == u) continue;
    const double w =
        interference_weight(tau_u, schedule.tau_flat(v), schedule.symbol_duration());
    denominator += gamma * std::norm(h_hat.dot(H.col(v))) * w;
  }
  return numerator / denominator;
}

SingleSampleTraining baseline_synchronous_training(const SystemConfig& config) {
  const PilotMatrix pilots = build_pilots(config);
  const int NK = config.n_ues();
  const int L = config.pilot_len();
  CMatrix R(NK, L);
  for (int r = 0; r < NK; ++r) R.row(r) = pilots.pilot(r % config.users_per_cell);
  return {R};
}

SingleSampleTraining single_sampler_training(const DelaySchedule& schedule,
                                             const PilotMatrix& pilots,
                                             const SystemConfig& config, int sampler_flat) {
  if (sampler_flat < 0 || sampler_flat >= config.n_ues())
    throw std::invalid_argument("sampler index out of range");
  const CMatrix R_full = build_R(schedule, pilots, config);
  const int L = config.pilot_len();
  return {R_full.middleCols(static_cast<Eigen::Index>(sampler_flat) * L, L)};
}

}  // namespace asyncpilot
