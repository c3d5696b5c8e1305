// Copyright 2026 The SCDA Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCDA_RNG_HPP_
#define SCDA_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace scda {

// Seed derivation and counter-based streams.
//
// All randomness is a pure function of explicit 64-bit seeds. Streams are
// keyed by (seed, tags...) so that draws do not depend on the order in which
// nodes or trials are visited. The uniform and normal transforms are written
// out here because the standard distributions are implementation-defined and
// would break byte-identical replay across standard libraries.
//
// A stream is the SplitMix64 sequence started at the derived key. Noise is
// drawn from a fresh stream per (node, round), so construction has to be
// O(1); a Mersenne Twister would spend most of its time seeding.

inline constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t DeriveSeed(
    std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = SplitMix64(seed);
  for (std::uint64_t t : tags) h = SplitMix64(h ^ SplitMix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}
  Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags)
      : state_(DeriveSeed(seed, tags)) {}

  std::uint64_t NextBits() {
    const std::uint64_t out = SplitMix64(state_);
    state_ += 0x9e3779b97f4a7c15ULL;
    return out;
  }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(NextBits() >> 11) * 0x1.0p-53; }

  // Uniform on [-half_width, half_width]; never exceeds half_width in
  // magnitude.
  double Symmetric(double half_width) {
    return (2.0 * Uniform() - 1.0) * half_width;
  }

  double Uniform(double low, double high) {
    return low + (high - low) * Uniform();
  }

  // Standard normal via Box-Muller; one variate per call.
  double Normal() {
    double u1 = Uniform();
    while (u1 <= 0.0) u1 = Uniform();
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace scda

#endif  // SCDA_RNG_HPP_
