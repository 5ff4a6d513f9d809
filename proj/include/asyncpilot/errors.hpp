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

#ifndef ASYNCPILOT_ERRORS_HPP
#define ASYNCPILOT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace asyncpilot {

// Thrown when the effective pilot Gram matrix is (numerically) singular,
// i.e. the pilot system cannot separate all users. This is the mathematical
// signature of pilot contamination under synchronous collisions.
class SingularPilotSystem : public std::runtime_error {
 public:
  explicit SingularPilotSystem(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an exhaustive delay search would exceed the evaluation cap.
class SearchSpaceTooLarge : public std::runtime_error {
 public:
  SearchSpaceTooLarge(const std::string& what, unsigned long long size)
      : std::runtime_error(what), space_size(size) {}
  unsigned long long space_size;
};

// Configuration file parse/validation error. `line` is 1-based, 0 if unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line_number = 0)
      : std::runtime_error(line_number > 0 ? "line " + std::to_string(line_number) + ": " + what
                                           : what),
        line(line_number) {}
  int line;
};

}  // namespace asyncpilot

#endif
