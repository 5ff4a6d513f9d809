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

#include "asyncpilot/config_file.hpp"

#include "asyncpilot/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace asyncpilot {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

int to_int(const std::string& v, const std::string& key, int line) {
  size_t pos = 0;
  int out = 0;
  try {
    out = std::stoi(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size()) throw ConfigError("key '" + key + "' expects an integer, got '" + v + "'", line);
  return out;
}

double to_double(const std::string& v, const std::string& key, int line) {
  size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size()) throw ConfigError("key '" + key + "' expects a number, got '" + v + "'", line);
  return out;
}

std::uint64_t to_u64(const std::string& v, const std::string& key, int line) {
  size_t pos = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size())
    throw ConfigError("key '" + key + "' expects an unsigned integer, got '" + v + "'", line);
  return out;
}

bool to_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "' expects a boolean, got '" + v + "'", line);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  bool saw_system = false;
  bool saw_sweep = false;
  SweepSpec sweep;
  bool sweep_has_values = false;

  std::istringstream stream(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section == "system") {
        saw_system = true;
      } else if (section == "sweep") {
        saw_sweep = true;
      } else if (section != "schedule" && section != "output") {
        throw ConfigError("unknown section '" + section + "'", line_no);
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    if (section.empty()) throw ConfigError("key '" + key + "' outside any section", line_no);

    if (section == "system") {
      if (key == "K") {
        cfg.system.cells = to_int(value, key, line_no);
      } else if (key == "N") {
        cfg.system.users_per_cell = to_int(value, key, line_no);
      } else if (key == "M") {
        cfg.system.antennas = to_int(value, key, line_no);
      } else if (key == "T") {
        cfg.system.symbol_duration = to_double(value, key, line_no);
      } else if (key == "snr_db") {
        cfg.snr_db = to_double(value, key, line_no);
      } else if (key == "pilot") {
        if (value == "identity") {
          cfg.system.pilot_kind = PilotKind::Identity;
        } else if (value == "dft") {
          cfg.system.pilot_kind = PilotKind::NormalizedDft;
        } else {
          throw ConfigError("pilot must be 'identity' or 'dft', got '" + value + "'", line_no);
        }
      } else {
        throw ConfigError("unknown key '" + key + "' in [system]", line_no);
      }
    } else if (section == "schedule") {
      if (key == "kind") {
        if (value == "equally_divided") {
          cfg.schedule.kind = ScheduleKind::EquallyDivided;
        } else if (value == "random") {
          cfg.schedule.kind = ScheduleKind::Random;
        } else if (value == "explicit") {
          cfg.schedule.kind = ScheduleKind::Explicit;
        } else if (value == "synchronous") {
          cfg.schedule.kind = ScheduleKind::Synchronous;
        } else if (value == "exhaustive_optimal") {
          cfg.schedule.kind = ScheduleKind::ExhaustiveOptimal;
        } else {
          throw ConfigError("unknown schedule kind '" + value + "'", line_no);
        }
      } else if (key == "delays") {
        cfg.schedule.explicit_delays.clear();
        for (const std::string& tok : split_ws(value))
          cfg.schedule.explicit_delays.push_back(to_double(tok, key, line_no));
      } else {
        throw ConfigError("unknown key '" + key + "' in [schedule]", line_no);
      }
    } else if (section == "sweep") {
      if (key == "variable") {
        if (value == "snr_db") {
          sweep.variable = SweepVariable::SnrDb;
        } else if (value == "antennas" || value == "M") {
          sweep.variable = SweepVariable::Antennas;
        } else if (value == "cells" || value == "K") {
          sweep.variable = SweepVariable::Cells;
        } else if (value == "users_per_cell" || value == "N") {
          sweep.variable = SweepVariable::UsersPerCell;
        } else if (value == "pilot") {
          sweep.variable = SweepVariable::PilotKind;
        } else if (value == "delay_scheme") {
          sweep.variable = SweepVariable::DelayScheme;
        } else {
          throw ConfigError("unknown sweep variable '" + value + "'", line_no);
        }
      } else if (key == "values") {
        sweep.values = split_ws(value);
        sweep_has_values = true;
      } else if (key == "trials") {
        sweep.trials = to_int(value, key, line_no);
        if (sweep.trials < 1) throw ConfigError("trials must be >= 1", line_no);
      } else if (key == "arms") {
        sweep.arms.clear();
        for (const std::string& tok : split_ws(value)) {
          if (tok == "async_oversampled") {
            sweep.arms.push_back(TrainingArm::AsyncOversampled);
          } else if (tok == "sync_baseline") {
            sweep.arms.push_back(TrainingArm::SyncBaseline);
          } else if (tok == "async_no_oversampling") {
            sweep.arms.push_back(TrainingArm::AsyncNoOversampling);
          } else {
            throw ConfigError("unknown arm '" + tok + "'", line_no);
          }
        }
      } else if (key == "estimator") {
        if (value == "lmmse") {
          sweep.estimator = EstimatorKind::Lmmse;
        } else if (value == "zf") {
          sweep.estimator = EstimatorKind::Zf;
        } else {
          throw ConfigError("estimator must be 'lmmse' or 'zf', got '" + value + "'", line_no);
        }
      } else if (key == "seed") {
        sweep.seed = to_u64(value, key, line_no);
      } else {
        throw ConfigError("unknown key '" + key + "' in [sweep]", line_no);
      }
    } else if (section == "output") {
      if (key == "path") {
        cfg.output.path = value;
      } else if (key == "format") {
        if (value != "csv") throw ConfigError("only 'csv' output format is supported", line_no);
        cfg.output.format = value;
      } else if (key == "plot_data") {
        cfg.output.plot_data = to_bool(value, key, line_no);
      } else {
        throw ConfigError("unknown key '" + key + "' in [output]", line_no);
      }
    }
  }

  if (!saw_system) throw ConfigError("missing required [system] section");
  cfg.system.snr = std::pow(10.0, cfg.snr_db / 10.0);
  try {
    cfg.system.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("[system] invalid: ") + e.what());
  }
  if (cfg.schedule.kind == ScheduleKind::Explicit &&
      static_cast<int>(cfg.schedule.explicit_delays.size()) != cfg.system.n_ues())
    throw ConfigError("explicit schedule needs exactly K*N delays");
  for (double t : cfg.schedule.explicit_delays)
    if (t < 0.0 || t > cfg.system.symbol_duration)
      throw ConfigError("explicit delay outside [0, T]");

  if (saw_sweep) {
    if (!sweep_has_values) throw ConfigError("[sweep] requires a 'values' key");
    sweep.base = cfg.system;
    sweep.schedule = cfg.schedule;
    cfg.sweep = std::move(sweep);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[system]\n";
  out << "K = " << cfg.system.cells << "\n";
  out << "N = " << cfg.system.users_per_cell << "\n";
  out << "M = " << cfg.system.antennas << "\n";
  out << "T = " << format_double(cfg.system.symbol_duration) << "\n";
  out << "snr_db = " << format_double(cfg.snr_db) << "\n";
  out << "pilot = " << (cfg.system.pilot_kind == PilotKind::Identity ? "identity" : "dft")
      << "\n";

  out << "\n[schedule]\n";
  out << "kind = ";
  switch (cfg.schedule.kind) {
    case ScheduleKind::EquallyDivided: out << "equally_divided"; break;
    case ScheduleKind::Random: out << "random"; break;
    case ScheduleKind::Explicit: out << "explicit"; break;
    case ScheduleKind::Synchronous: out << "synchronous"; break;
    case ScheduleKind::ExhaustiveOptimal: out << "exhaustive_optimal"; break;
  }
  out << "\n";
  if (!cfg.schedule.explicit_delays.empty()) {
    out << "delays =";
    for (double d : cfg.schedule.explicit_delays) out << " " << format_double(d);
    out << "\n";
  }

  if (cfg.sweep) {
    const SweepSpec& s = *cfg.sweep;
    out << "\n[sweep]\n";
    out << "variable = " << sweep_variable_name(s.variable) << "\n";
    out << "values =";
    for (const std::string& v : s.values) out << " " << v;
    out << "\n";
    out << "trials = " << s.trials << "\n";
    out << "arms =";
    for (TrainingArm a : s.arms) out << " " << arm_name(a);
    out << "\n";
    out << "estimator = " << (s.estimator == EstimatorKind::Lmmse ? "lmmse" : "zf") << "\n";
    out << "seed = " << s.seed << "\n";
  }

  out << "\n[output]\n";
  out << "path = " << cfg.output.path << "\n";
  out << "format = " << cfg.output.format << "\n";
  out << "plot_data = " << (cfg.output.plot_data ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace asyncpilot
