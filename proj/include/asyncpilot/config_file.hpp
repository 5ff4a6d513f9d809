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
// Plain INI-style experiment configuration:
//
//   [system]   K, N, M, T, snr_db, pilot
//   [schedule] kind = equally_divided | random | explicit | synchronous, delays = ...
//   [sweep]    variable, values, trials, arms, estimator, seed
//   [output]   path, format, plot_data
//
// Unknown sections or keys are rejected with their line numbers. SNR is given
// in dB in files and converted once to linear; library APIs take linear SNR.

#ifndef ASYNCPILOT_CONFIG_FILE_HPP
#define ASYNCPILOT_CONFIG_FILE_HPP

#include "asyncpilot/montecarlo.hpp"

#include <optional>
#include <string>

namespace asyncpilot {

struct OutputSpec {
  std::string path = "results";
  std::string format = "csv";
  bool plot_data = false;
};

struct ExperimentConfig {
  SystemConfig system;
  double snr_db = 20.0;  // as written in the file; system.snr holds the linear value
  ScheduleSpec schedule;
  std::optional<SweepSpec> sweep;  // [sweep] section present
  OutputSpec output;
};

// Throws ConfigError (with 1-based line numbers) on malformed, unknown or
// invalid entries.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical serialization; parse(serialize(parse(text))) == parse(text).
std::string serialize_config(const ExperimentConfig& config);

}  // namespace asyncpilot

#endif
