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

#ifndef ASYNCPILOT_RNG_HPP
#define ASYNCPILOT_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>

namespace asyncpilot {

namespace detail {
// splitmix64 output function (Steele/Lea/Flood).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}  // namespace detail

// Counter-based random stream. A stream is fully determined by (seed, stream_id):
// the i-th output is mix64(key + i*golden), so draws are reproducible and
// independent streams can be handed to parallel workers without shared state.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id), counter_(0) {
    key_ = detail::mix64(seed + detail::kGolden);
    key_ = detail::mix64(key_ ^ (stream_id + detail::kGolden));
  }

  // Derives a stream id from a list of component indices (trial, purpose, ...).
  static std::uint64_t derive(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x42ULL;
    for (std::uint64_t p : parts) h = detail::mix64(h + detail::kGolden + p);
    return h;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64() { return detail::mix64(key_ + (++counter_) * detail::kGolden); }

  // Uniform on the open interval (0, 1); never returns 0 so it is safe under log().
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  // Standard circularly-symmetric complex Gaussian, E|z|^2 = 1
  // (real and imaginary parts each have variance 1/2).
  std::complex<double> complex_normal() {
    const double r = std::sqrt(-std::log(uniform()));
    const double phi = 2.0 * M_PI * uniform();
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  // Real standard normal via Box-Muller (one value per two uniforms; no caching
  // so the stream position stays a pure function of the draw count).
  double normal() {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    return r * std::cos(2.0 * M_PI * uniform());
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace asyncpilot

#endif
