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
// Random generation, trial execution and parameter sweeps. All randomness
// flows through counter-based streams derived from (seed, trial, purpose,
// ...), so trials are independent of execution order and sweeps reproduce
// byte-identically under any job count. Channel streams exclude the training
// arm, which pairs channel realizations across arms for variance-reduced
// comparisons.

#ifndef ASYNCPILOT_MONTECARLO_HPP
#define ASYNCPILOT_MONTECARLO_HPP

#include "asyncpilot/estimators.hpp"
#include "asyncpilot/model.hpp"
#include "asyncpilot/rng.hpp"
#include "asyncpilot/uplink_rate.hpp"

#include <cstdint>
#include <string>

namespace asyncpilot {

// Stream purposes; combined with the trial index (and base station / arm
// where applicable) to derive independent sub-streams.
enum class StreamPurpose : std::uint64_t { Channel = 1, Noise = 2, Delays = 3 };

RngStream channel_stream(std::uint64_t seed, int trial, int base_station);
RngStream noise_stream(std::uint64_t seed, int trial, int base_station, TrainingArm arm);
RngStream delay_stream(std::uint64_t seed, int trial);

// M x NK complex channel matrix in flat user order.
using ChannelRealization = CMatrix;

// Column (k, n) is i.i.d. circular complex Gaussian with total variance
// sigma2(k, n) (variance/2 per real component).
ChannelRealization sample_channel(const ChannelProfile& profile, int antennas, RngStream& rng);

// Symmetric PSD factor F with F F^T = R_NN, via eigendecomposition with
// eigenvalues below 1e-12 clamped to zero. Rows belonging to samplers with
// exactly equal delays come out exactly equal, so duplicated samplers share
// their noise sample.
Matrix psd_noise_factor(const Matrix& R_NN);

// M x S training-noise matrix with per-row covariance R_NN: each antenna row
// is g F^T for a standard complex Gaussian row g.
CMatrix sample_training_noise(const Matrix& R_NN, int antennas, RngStream& rng);
CMatrix sample_training_noise_with_factor(const Matrix& factor, int antennas, RngStream& rng);

// One full training + rate evaluation pass over all base-station viewpoints.
struct TrialOptions {
  double noise_scale = 1.0;  // diagnostic: 0 disables training noise
};
struct TrialResult {
  double squared_error = 0.0;      // ||H_hat - H||_F^2 / (K N M), mean over BS viewpoints
  std::vector<double> per_ue_rate;  // log2(1 + SINR), flat user order
};
TrialResult run_trial(const SystemConfig& config, const DelaySchedule& schedule, TrainingArm arm,
                      EstimatorKind estimator, int trial_index, std::uint64_t seed,
                      const TrialOptions& options = {});

// Mean over trials of the per-trial normalized squared estimation error.
double empirical_mse(const SystemConfig& config, const DelaySchedule& schedule,
                     EstimatorKind estimator, int trials, std::uint64_t seed, int jobs = 1,
                     double noise_scale = 1.0);

// Analytic counterpart of empirical_mse: the per-base-station viewpoint
// analytic MSE averaged over the K serving profiles.
double analytic_mse_reference(const SystemConfig& config, const DelaySchedule& schedule,
                              EstimatorKind estimator);

// Schedule selection for experiments.
enum class ScheduleKind { EquallyDivided, Random, Explicit, Synchronous, ExhaustiveOptimal };
struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::EquallyDivided;
  std::vector<double> explicit_delays;  // flat order, Explicit only
};

// Resolves a schedule spec to a concrete schedule. Random draws once from
// (seed, trial 0); in sweeps the Random kind instead redraws per trial.
DelaySchedule make_schedule(const ScheduleSpec& spec, const SystemConfig& config,
                            std::uint64_t seed);

// Parameter sweeps over a scenario variable.
enum class SweepVariable { SnrDb, Antennas, Cells, UsersPerCell, PilotKind, DelayScheme };

// Experiment-setup defaults: 100 antennas, 20 dB receive SNR, identity pilots.
SystemConfig experiment_defaults();

struct SweepSpec {
  SweepVariable variable = SweepVariable::SnrDb;
  std::vector<std::string> values;
  SystemConfig base = experiment_defaults();  // unless swept
  ScheduleSpec schedule;
  std::vector<TrainingArm> arms = {TrainingArm::AsyncOversampled, TrainingArm::SyncBaseline,
                                   TrainingArm::AsyncNoOversampling};
  EstimatorKind estimator = EstimatorKind::Lmmse;
  int trials = 1000;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string scenario_id;  // derived from the base config when empty
};

// One emitted measurement (or recorded per-point error).
struct ResultRow {
  std::string scenario_id;
  std::string arm;
  std::string sweep_var;
  std::string sweep_value;
  std::string metric;
  double value = 0.0;
  double ci_halfwidth = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
};

std::string arm_name(TrainingArm arm);
std::string sweep_variable_name(SweepVariable v);

// Runs every (value, arm) point; per-point failures are recorded as
// metric "error:<kind>" rows and the sweep continues. Rows come back sorted
// by (sweep_value, arm, metric); numeric values sort numerically.
std::vector<ResultRow> run_sweep(const SweepSpec& spec);

}  // namespace asyncpilot

#endif
