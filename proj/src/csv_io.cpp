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

#include "asyncpilot/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace asyncpilot {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string result_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << kResultCsvHeader << "\n";
  for (const ResultRow& r : rows) {
    out << r.scenario_id << ',' << r.arm << ',' << r.sweep_var << ',' << r.sweep_value << ','
        << r.metric << ',' << format_full(r.value) << ',' << format_full(r.ci_halfwidth) << ','
        << r.trials << ',' << r.seed << "\n";
  }
  return out.str();
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string format_complex(const Complex& z) {
  if (z.imag() == 0.0) return format_full(z.real());
  const std::string im = format_full(std::abs(z.imag()));
  return format_full(z.real()) + (z.imag() < 0 ? "-" : "+") + im + "i";
}

}  // namespace

void write_result_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  write_text(path, result_csv(rows));
}

std::string matrix_csv(const Matrix& m) {
  std::ostringstream out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_full(m(r, c));
    }
    out << "\n";
  }
  return out.str();
}

std::string matrix_csv(const CMatrix& m) {
  std::ostringstream out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_complex(m(r, c));
    }
    out << "\n";
  }
  return out.str();
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  write_text(path, matrix_csv(m));
}

void write_matrix_csv(const std::string& path, const CMatrix& m) {
  write_text(path, matrix_csv(m));
}

void write_plot_data(const std::string& directory, const std::string& scenario_id,
                     const std::vector<ResultRow>& rows) {
  std::map<std::string, std::ostringstream> per_arm;
  for (const ResultRow& r : rows) {
    if (r.metric != "avg_rate_per_ue") continue;
    per_arm[r.arm] << r.sweep_value << ' ' << format_full(r.value) << "\n";
  }
  for (auto& [arm, text] : per_arm)
    write_text(directory + "/" + scenario_id + "_" + arm + ".dat", text.str());
}

}  // namespace asyncpilot
