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
// Post-training uplink performance under maximum ratio combining. Data
// transmission is never oversampled: each user's symbols are detected from the
// single sample stream synchronized to that user, so other users enter through
// at most two adjacent symbol overlaps whose squared coefficient norm
// ||r||^2 = rho^2 + (1-rho)^2 weights their interference power. Rate
// evaluation is closed-form given a channel realization (data symbols are
// integrated out by the SINR expression).

#ifndef ASYNCPILOT_UPLINK_RATE_HPP
#define ASYNCPILOT_UPLINK_RATE_HPP

#include "asyncpilot/estimators.hpp"
#include "asyncpilot/model.hpp"

#include <cstdint>

namespace asyncpilot {

// Training variants compared in experiments.
enum class TrainingArm {
  AsyncOversampled,     // proposed scheme: one sample per user timing
  SyncBaseline,         // conventional synchronous training, white noise
  AsyncNoOversampling,  // conventional single-sample training on async arrivals
};

// Asynchronous-transmission coefficient row over one data block: at most two
// adjacent nonzero entries that sum to 1, or a single 1 when synchronous.
using InterferenceVector = Eigen::RowVectorXd;

// Coefficient row seen by the sampler of the target user at interior symbol
// index i (1-based, 1 < i < L), with the direct overlap entry first.
InterferenceVector interference_vector(int i, double tau_target, double tau_interferer,
                                       int data_block_len, double symbol_duration);

// Squared norm of the interference vector, (1-d)^2 + d^2 with
// d = |tau_target - tau_interferer|/T; lies in [1/2, 1].
double interference_weight(double tau_target, double tau_interferer, double symbol_duration);

// Instantaneous post-MRC SINR of user (k, n) at its serving base station:
//   gamma |h_hat^H h_hat|^2 /
//   (gamma |h_hat^H (h - h_hat)|^2 + gamma sum' |h_hat^H h'|^2 ||r'||^2 + ||h_hat||^2).
// H and H_hat are M x NK in flat user order as seen by base station k.
// A zero estimated channel yields SINR 0.
double sinr(const CMatrix& H, const CMatrix& H_hat, const DelaySchedule& schedule, double gamma,
            int cell, int user);

// Synchronous-training matrices: the stacked-pilot coefficient matrix
// (NK x L) and white noise (R_NN = I implicitly).
struct SingleSampleTraining {
  CMatrix R;  // NK x L
};
SingleSampleTraining baseline_synchronous_training(const SystemConfig& config);

// Conventional single-sample receiver applied to asynchronously arriving
// signals: base station samples once per symbol at the timing of its user
// `sampler_flat`, giving the corresponding column block of the full R.
SingleSampleTraining single_sampler_training(const DelaySchedule& schedule,
                                             const PilotMatrix& pilots,
                                             const SystemConfig& config, int sampler_flat);

// Monte Carlo average achievable rate per user.
struct RateResult {
  std::vector<double> per_ue;  // flat order, mean over trials
  double average = 0.0;        // grand mean
  double ci_halfwidth = 0.0;   // 1.96 * std(per-trial means) / sqrt(trials)
  int trials = 0;
  std::uint64_t seed = 0;
};

// Runs `trials` independent channel/noise draws of the chosen training arm and
// averages log2(1 + SINR) per user. Deterministic given (config, schedule,
// arm, estimator, trials, seed), independent of `jobs`. The estimator kind
// applies to the oversampled arm; baseline arms always use the regularized
// LMMSE path. Propagates SingularPilotSystem for ZF on synchronous schedules.
RateResult average_rate(const SystemConfig& config, const DelaySchedule& schedule,
                        TrainingArm arm, EstimatorKind estimator, int trials,
                        std::uint64_t seed, int jobs = 1);

// Proposed-scheme shorthand (TrainingArm::AsyncOversampled).
RateResult average_rate(const SystemConfig& config, const DelaySchedule& schedule,
                        EstimatorKind estimator, int trials, std::uint64_t seed, int jobs = 1);

}  // namespace asyncpilot

#endif
