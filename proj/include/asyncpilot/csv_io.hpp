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

#ifndef ASYNCPILOT_CSV_IO_HPP
#define ASYNCPILOT_CSV_IO_HPP

#include "asyncpilot/model.hpp"
#include "asyncpilot/montecarlo.hpp"

#include <string>
#include <vector>

namespace asyncpilot {

// Stable result-CSV header.
inline constexpr const char* kResultCsvHeader =
    "scenario_id,arm,sweep_var,sweep_value,metric,value,ci_halfwidth,trials,seed";

// Full round-trip precision (17 significant digits).
std::string format_full(double v);

// Result rows as CSV text (header + one line per row, LF endings).
std::string result_csv(const std::vector<ResultRow>& rows);
void write_result_csv(const std::string& path, const std::vector<ResultRow>& rows);

// Row-major full-precision matrix CSV; complex entries as "re+imi".
std::string matrix_csv(const Matrix& m);
std::string matrix_csv(const CMatrix& m);
void write_matrix_csv(const std::string& path, const Matrix& m);
void write_matrix_csv(const std::string& path, const CMatrix& m);

// Two-column (sweep value, metric value) plot data per arm.
void write_plot_data(const std::string& directory, const std::string& scenario_id,
                     const std::vector<ResultRow>& rows);

}  // namespace asyncpilot

#endif
