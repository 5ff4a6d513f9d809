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
// Numerical verification of the library's closed forms and structural claims:
// positive definiteness of the pilot Gram matrix and the ZF MSE bound,
// interference-free pilot groups under the equally-divided ordering, the
// closed-form group inverse and total MSE, convexity/symmetrization of the
// trace objective, the centrosymmetric eigenvalue split, grid-search optima
// and estimator Monte Carlo consistency.

#ifndef ASYNCPILOT_VERIFICATION_HPP
#define ASYNCPILOT_VERIFICATION_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace asyncpilot {

enum class VerifyLevel { Fast, Full };

struct VerifyOptions {
  std::uint64_t seed = 20260810;
  int jobs = 1;
  // Fault-injection hook: additively perturbs mu inside the closed-form
  // inverse check. Nonzero values must make that check fail.
  double perturb_mu = 0.0;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  std::string detail;
};

std::vector<CheckResult> run_verification(VerifyLevel level, const VerifyOptions& options = {});

// Plain-text report, one PASS/FAIL line per check. Returns true iff all pass.
bool print_verification_report(const std::vector<CheckResult>& results, std::ostream& out);

}  // namespace asyncpilot

#endif
