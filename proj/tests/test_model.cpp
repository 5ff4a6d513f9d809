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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "asyncpilot/model.hpp"
#include "asyncpilot/rng.hpp"
#include "oracles.hpp"

#include <Eigen/SVD>

using namespace asyncpilot;

namespace {

SystemConfig make_config(int K, int N, PilotKind kind = PilotKind::Identity) {
  SystemConfig c;
  c.cells = K;
  c.users_per_cell = N;
  c.antennas = 4;
  c.snr = 1.0;
  c.pilot_kind = kind;
  return c;
}

DelaySchedule random_schedule(int K, int N, RngStream& rng, double T = 1.0) {
  std::vector<double> taus(static_cast<size_t>(K) * N);
  for (double& t : taus) t = rng.uniform() * T;
  return DelaySchedule(K, N, T, std::move(taus));
}

}  // namespace

TEST_CASE("overlap coefficients match the rectangular-pulse formula") {
  auto [d1, s1] = overlap_coeffs(0.2, 0.5, 1.0);
  CHECK(d1 == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(s1 == doctest::Approx(0.3).epsilon(1e-15));

  auto [d2, s2] = overlap_coeffs(0.4, 0.4, 1.0);
  CHECK(d2 == 1.0);
  CHECK(s2 == 0.0);

  auto [d3, s3] = overlap_coeffs(0.0, 1.0, 1.0);
  CHECK(d3 == 0.0);
  CHECK(s3 == 1.0);
}

TEST_CASE("overlap coefficients reject delays outside the symbol") {
  CHECK_THROWS_AS(overlap_coeffs(-0.1, 0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(overlap_coeffs(0.1, 1.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(overlap_coeffs(0.1, 0.5, 0.0), std::domain_error);
}

TEST_CASE("overlap coefficient pairs sum to one and agree with quadrature") {
  RngStream rng(7, 1);
  for (int t = 0; t < 200; ++t) {
    const double a = rng.uniform(), b = rng.uniform();
    const auto [direct, shifted] = overlap_coeffs(a, b, 1.0);
    CHECK(direct + shifted == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(direct == doctest::Approx(oracles::window_overlap(a, b, 1.0)).epsilon(1e-12));
  }
  // Brute-force integration agrees with the interval-intersection oracle.
  const double quad = oracles::window_overlap_quadrature(0.0, 0.3, 1.0);
  CHECK(quad == doctest::Approx(0.7).epsilon(2e-4));
}

TEST_CASE("identity pilots are standard basis rows") {
  const PilotMatrix p = build_pilots(make_config(1, 2));
  CHECK(p.rows(0, 0) == Complex(1.0, 0.0));
  CHECK(p.rows(0, 1) == Complex(0.0, 0.0));
  CHECK(p.rows(1, 0) == Complex(0.0, 0.0));
  CHECK(p.rows(1, 1) == Complex(1.0, 0.0));
}

TEST_CASE("two-point DFT pilots") {
  const PilotMatrix p = build_pilots(make_config(1, 2, PilotKind::NormalizedDft));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(p.rows(0, 0) - Complex(r, 0)) < 1e-15);
  CHECK(std::abs(p.rows(0, 1) - Complex(r, 0)) < 1e-15);
  CHECK(std::abs(p.rows(1, 0) - Complex(r, 0)) < 1e-15);
  CHECK(std::abs(p.rows(1, 1) - Complex(-r, 0)) < 1e-15);
}

TEST_CASE("block-diagonal pilot matrix repeats the per-cell pilot pattern") {
  const PilotMatrix p = build_pilots(make_config(2, 2));
  REQUIRE(p.full.rows() == 4);
  REQUIRE(p.full.cols() == 8);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 8; ++c) {
      const Complex expected = (c / 2 == r) ? p.rows(r % 2, c % 2) : Complex(0, 0);
      CHECK(p.full(r, c) == expected);
    }
}

TEST_CASE("pilot rows are orthonormal for both kinds") {
  for (PilotKind kind : {PilotKind::Identity, PilotKind::NormalizedDft})
    for (int N : {1, 2, 3, 5}) {
      const PilotMatrix p = build_pilots(make_config(2, N, kind));
      const CMatrix gram = p.rows * p.rows.adjoint();
      CHECK((gram - CMatrix::Identity(N, N)).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("every R_P block is the identity for a synchronous schedule") {
  // All samplers coincide, so each pair's covariance block is I_L and the
  // full matrix is the (singular) all-ones block pattern.
  const SystemConfig cfg = make_config(2, 2);
  const Matrix rp = build_R_P(DelaySchedule::synchronous(2, 2), cfg);
  for (int r = 0; r < 4; ++r)
    for (int t = 0; t < 4; ++t)
      CHECK((rp.block(2 * r, 2 * t, 2, 2) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() ==
            0.0);
  CHECK((rp - oracles::noise_covariance_oracle(DelaySchedule::synchronous(2, 2), 2))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("R_P reproduces the 2-cell 2-user banded pattern") {
  // tau_11 < tau_12 < tau_21 < tau_22; the (r,t) block carries the pair's
  // direct coefficient on the diagonal and the shifted one on the band whose
  // side follows the delay order.
  const SystemConfig cfg = make_config(2, 2);
  const std::vector<double> tau = {0.0, 0.2, 0.5, 0.9};
  const Matrix rp = build_R_P(DelaySchedule(2, 2, 1.0, tau), cfg);
  REQUIRE(rp.rows() == 8);

  Matrix expected = Matrix::Zero(8, 8);
  for (int r = 0; r < 4; ++r)
    for (int t = 0; t < 4; ++t) {
      const double d = std::abs(tau[r] - tau[t]);
      Matrix block = Matrix::Identity(2, 2) * (r == t ? 1.0 : 1.0 - d);
      if (tau[r] < tau[t]) block(1, 0) = d;
      if (tau[r] > tau[t]) block(0, 1) = d;
      expected.block(2 * r, 2 * t, 2, 2) = block;
    }
  CHECK((rp - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("a single R_P block matches the hand-integrated overlap values") {
  // Frozen from integrating the shifted rectangular windows by hand.
  SystemConfig two = make_config(1, 2);
  // Users a (tau 0.0) and b (tau 0.3), L = 2.
  const DelaySchedule sched(1, 2, 1.0, {0.0, 0.3});
  const Matrix rp = build_R_P(sched, two);
  const Matrix block = rp.block(0, 2, 2, 2);
  CHECK(block(0, 0) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(block(0, 1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(block(1, 0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(block(1, 1) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK((block - oracles::noise_block_oracle(0.0, 0.3, 2, 1.0)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("R_P equals the window-overlap noise covariance for random schedules") {
  RngStream rng(11, 2);
  for (int t = 0; t < 50; ++t) {
    const int K = 2 + static_cast<int>(rng.next_u64() % 3);
    const int N = 1 + static_cast<int>(rng.next_u64() % 3);
    const SystemConfig cfg = make_config(K, N);
    const DelaySchedule sched = random_schedule(K, N, rng);
    const Matrix rp = build_R_P(sched, cfg);
    CHECK((rp - oracles::noise_covariance_oracle(sched, N)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((rp - rp.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rp, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
  }
}

TEST_CASE("R factors exactly as P * R_P") {
  RngStream rng(13, 3);
  for (PilotKind kind : {PilotKind::Identity, PilotKind::NormalizedDft})
    for (int t = 0; t < 25; ++t) {
      const int K = 2 + static_cast<int>(rng.next_u64() % 2);
      const int N = 1 + static_cast<int>(rng.next_u64() % 3);
      const SystemConfig cfg = make_config(K, N, kind);
      const DelaySchedule sched = random_schedule(K, N, rng);
      const PilotMatrix pilots = build_pilots(cfg);
      const CMatrix r = build_R(sched, pilots, cfg);
      const CMatrix product = pilots.full * build_R_P(sched, cfg);
      CHECK((r - product).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("fully synchronous R degrades to replicated stacked pilots") {
  const SystemConfig cfg = make_config(2, 2);
  const PilotMatrix pilots = build_pilots(cfg);
  const CMatrix r = build_R(DelaySchedule::synchronous(2, 2), pilots, cfg);
  CMatrix stacked(4, 2);
  stacked.row(0) = pilots.pilot(0);
  stacked.row(1) = pilots.pilot(1);
  stacked.row(2) = pilots.pilot(0);
  stacked.row(3) = pilots.pilot(1);
  for (int block = 0; block < 4; ++block)
    CHECK((r.middleCols(2 * block, 2) - stacked).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("equal delays of same-pilot users duplicate rows of R") {
  const SystemConfig cfg = make_config(2, 2);
  const DelaySchedule sched(2, 2, 1.0, {0.1, 0.4, 0.1, 0.7});  // tau_11 == tau_21
  const PilotMatrix pilots = build_pilots(cfg);
  const CMatrix r = build_R(sched, pilots, cfg);
  CHECK((r.row(0) - r.row(2)).cwiseAbs().maxCoeff() == 0.0);
  Eigen::JacobiSVD<CMatrix> svd(r);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-10 * svd.singularValues()(0)) ++rank;
  CHECK(rank < 4);
}

TEST_CASE("A is the identity for two users a full symbol apart") {
  const SystemConfig cfg = make_config(2, 1);
  const DelaySchedule sched(2, 1, 1.0, {0.0, 1.0});
  const TrainingMatrices tm = make_training_matrices(sched, cfg);
  CHECK((tm.A - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("A of a three-user group with half-symbol gaps") {
  const SystemConfig cfg = make_config(3, 1);
  const DelaySchedule sched(3, 1, 1.0, {0.0, 0.5, 1.0});
  const TrainingMatrices tm = make_training_matrices(sched, cfg);
  Matrix expected(3, 3);
  expected << 1.0, 0.5, 0.0, 0.5, 1.0, 0.5, 0.0, 0.5, 1.0;
  CHECK((tm.A.real() - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(tm.A.imag().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("A has unit diagonal and is Hermitian for any schedule and pilot kind") {
  RngStream rng(17, 4);
  for (PilotKind kind : {PilotKind::Identity, PilotKind::NormalizedDft})
    for (int t = 0; t < 20; ++t) {
      const SystemConfig cfg = make_config(3, 2, kind);
      const DelaySchedule sched = random_schedule(3, 2, rng);
      const TrainingMatrices tm = make_training_matrices(sched, cfg);
      CHECK((tm.A - tm.A.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
      for (int i = 0; i < tm.A.rows(); ++i)
        CHECK(std::abs(tm.A(i, i) - Complex(1, 0)) < 1e-12);
    }
}

TEST_CASE("pairwise distinct delays give a positive definite A") {
  RngStream rng(19, 5);
  for (int t = 0; t < 200; ++t) {
    const int K = 2 + static_cast<int>(rng.next_u64() % 3);
    const int N = 1 + static_cast<int>(rng.next_u64() % 3);
    const TrainingMatrices tm =
        make_training_matrices(random_schedule(K, N, rng), make_config(K, N));
    CHECK(tm.a_eigen_min > 0.0);
  }
}

TEST_CASE("an equal-delay pilot collision makes A singular") {
  const SystemConfig cfg = make_config(2, 2);
  const DelaySchedule sched(2, 2, 1.0, {0.25, 0.6, 0.25, 0.8});
  const TrainingMatrices tm = make_training_matrices(sched, cfg);
  CHECK(std::abs(tm.A.fullPivLu().determinant()) < 1e-12);
  CHECK(tm.a_singular());
}

TEST_CASE("duplicate delay detection") {
  const DelaySchedule distinct(2, 2, 1.0, {0.0, 0.25, 0.5, 0.75});
  CHECK(detect_duplicate_delays(distinct, 1e-9).empty());

  const DelaySchedule all_zero = DelaySchedule::synchronous(2, 2);
  CHECK(detect_duplicate_delays(all_zero, 1e-9).size() == 6);

  const DelaySchedule one_pair(2, 2, 1.0, {0.2, 0.5, 0.2, 0.9});
  const auto pairs = detect_duplicate_delays(one_pair, 1e-9);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].first == UeIndex{0, 0});
  CHECK(pairs[0].second == UeIndex{1, 0});
}

TEST_CASE("schedule total order breaks ties by user then cell") {
  const DelaySchedule sched(2, 2, 1.0, {0.5, 0.5, 0.5, 0.1});
  const auto order = sched.sorted_indices();
  REQUIRE(order.size() == 4);
  CHECK(order[0] == 3);  // smallest delay
  CHECK(order[1] == 0);  // tie: user 0 cell 0
  CHECK(order[2] == 2);  // tie: user 0 cell 1
  CHECK(order[3] == 1);  // tie: user 1 cell 0
}

TEST_CASE("config and schedule validation") {
  SystemConfig c = make_config(2, 2);
  c.cells = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = make_config(2, 2);
  c.snr = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  CHECK_THROWS_AS(DelaySchedule(2, 2, 1.0, {0.0, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(DelaySchedule(2, 1, 1.0, {0.0, 1.5}), std::domain_error);
  CHECK_THROWS_AS(detect_duplicate_delays(DelaySchedule::synchronous(2, 1), -1.0),
                  std::invalid_argument);
}

TEST_CASE("pilot shifting drops one symbol and zero-fills") {
  Eigen::RowVectorXcd p(3);
  p << Complex(1, 0), Complex(2, 0), Complex(3, 0);
  const auto left = shift_pilot(p, +1);
  CHECK(left(0) == Complex(2, 0));
  CHECK(left(1) == Complex(3, 0));
  CHECK(left(2) == Complex(0, 0));
  const auto right = shift_pilot(p, -1);
  CHECK(right(0) == Complex(0, 0));
  CHECK(right(1) == Complex(1, 0));
  CHECK(right(2) == Complex(2, 0));
}
