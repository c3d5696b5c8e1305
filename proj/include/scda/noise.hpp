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

#ifndef SCDA_NOISE_HPP_
#define SCDA_NOISE_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scda/error.hpp"
#include "scda/rng.hpp"
#include "scda/topology.hpp"

namespace scda {

// Privacy noise processes.
//
// The zero-sum scheme never draws theta directly. Each node draws a chain of
// offsets delta(0), delta(1), ... with |delta(m)| <= (alpha/2) rho^(m+1) and
// broadcasts theta(k) = delta(k) - delta(k-1) (delta(-1) = 0), so the running
// sum of theta is always the latest delta and the total injected noise
// vanishes as the envelope shrinks.
//
// Offsets are truncated toward zero onto a fixed power-of-two grid (see
// NoiseQuantum). Every difference and partial sum of grid values of this
// magnitude is exactly representable, which makes the telescoping identity
// sum(theta(0..K)) == delta(K) hold bit for bit in double arithmetic.
//
// Draws are counter based: delta for (seed, node, k) is a pure function of
// those values, independent of the order in which nodes are advanced.

enum class NoiseDistribution { kUniform, kTruncatedGaussian };

enum class NoiseScheme {
  kScda,                 // telescoping zero-sum, optionally in h sub-sequences
  kIndependentDecaying,  // decaying but not zero-sum
  kGaussianConstant,     // i.i.d. normal, no decay
  kZero,
};

inline std::string_view ToString(NoiseDistribution d) {
  return d == NoiseDistribution::kUniform ? "uniform" : "truncated_gaussian";
}

inline std::string_view ToString(NoiseScheme s) {
  switch (s) {
    case NoiseScheme::kScda: return "scda";
    case NoiseScheme::kIndependentDecaying: return "independent_decaying";
    case NoiseScheme::kGaussianConstant: return "gaussian_constant";
    case NoiseScheme::kZero: return "zero";
  }
  return "?";
}

inline NoiseDistribution ParseNoiseDistribution(std::string_view name) {
  if (name == "uniform") return NoiseDistribution::kUniform;
  if (name == "truncated_gaussian") return NoiseDistribution::kTruncatedGaussian;
  throw ConfigError("noise.distribution: unknown distribution '" +
                    std::string(name) + "'");
}

inline NoiseScheme ParseNoiseScheme(std::string_view name) {
  for (NoiseScheme s : {NoiseScheme::kScda, NoiseScheme::kIndependentDecaying,
                        NoiseScheme::kGaussianConstant, NoiseScheme::kZero}) {
    if (ToString(s) == name) return s;
  }
  throw ConfigError("noise.scheme: unknown scheme '" + std::string(name) + "'");
}

struct NoiseParams {
  double alpha = 1.0;
  double rho = 0.9;
  int h = 1;
  NoiseDistribution distribution = NoiseDistribution::kUniform;
  std::uint64_t seed = 0;

  void Validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw ConfigError("alpha must be > 0");
    }
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho must be in [0,1)");
    if (h < 1) throw ConfigError("h must be >= 1");
  }
};

// Scheme plus its parameters; `gaussian_variance` only matters for
// kGaussianConstant.
struct NoiseConfig {
  NoiseScheme scheme = NoiseScheme::kScda;
  NoiseParams params;
  double gaussian_variance = 1.0;
};

// Bound on |delta(m)|: (alpha/2) rho^(m+1).
inline double DeltaEnvelope(const NoiseParams& p, int m) {
  return 0.5 * p.alpha * std::pow(p.rho, m + 1);
}

// Bound on |theta(k)| for the plain scheme: alpha rho^k. For h sub-sequences
// the bound applies to the inner index k div h.
inline double ThetaEnvelope(const NoiseParams& p, int k) {
  return p.alpha * std::pow(p.rho, k / p.h);
}

// Power-of-two grid spacing for delta values, about 1e-15 * alpha * h.
inline double NoiseQuantum(const NoiseParams& p) {
  const int exponent = std::ilogb(p.alpha * p.h) - 50;
  return std::ldexp(1.0, exponent);
}

// Draws a value in [-bound, bound] from the configured distribution, keyed by
// (seed, stream, node, k), and truncates it toward zero onto the grid.
inline double DrawOnGrid(const NoiseParams& p, std::uint64_t stream_tag,
                         NodeId node, int k, double bound) {
  if (bound <= 0.0) return 0.0;
  Stream stream(p.seed, {stream_tag, static_cast<std::uint64_t>(node),
                         static_cast<std::uint64_t>(k)});
  double value = 0.0;
  if (p.distribution == NoiseDistribution::kUniform) {
    value = stream.Symmetric(bound);
  } else {
    // Normal with sd = bound/2, conditioned on [-bound, bound].
    do {
      value = 0.5 * bound * stream.Normal();
    } while (std::abs(value) > bound);
  }
  const double q = NoiseQuantum(p);
  return std::trunc(value / q) * q;
}

inline constexpr std::uint64_t kDeltaStream = 1;
inline constexpr std::uint64_t kBaselineStream = 2;

// Per-node state of the zero-sum process. `chain_delta[l]` is the latest
// offset of sub-sequence l (a single chain when h = 1); `last_delta` mirrors
// the chain that was advanced most recently.
struct NoiseState {
  NodeId node = 0;
  int k = -1;  // last iteration drawn; -1 when fresh
  double last_delta = 0.0;
  double cumulative_theta = 0.0;
  std::vector<double> chain_delta;
};

inline NoiseState FreshNoiseState(const NoiseParams& p, NodeId node) {
  NoiseState s;
  s.node = node;
  s.chain_delta.assign(p.h, 0.0);
  return s;
}

// theta(k) for h sub-sequences assigned round-robin: iteration k belongs to
// chain k mod h at inner index k div h. With h = 1 this is the plain scheme.
inline double SubsequenceStep(const NoiseParams& p, NoiseState& state, int k) {
  internal::Require(k == state.k + 1,
                    "noise step out of order: expected k=" +
                        std::to_string(state.k + 1) + ", got " +
                        std::to_string(k));
  if (static_cast<int>(state.chain_delta.size()) != p.h) {
    state.chain_delta.assign(p.h, 0.0);
  }
  const int chain = k % p.h;
  const int inner = k / p.h;
  const double delta =
      DrawOnGrid(p, kDeltaStream, state.node, k, DeltaEnvelope(p, inner));
  const double theta = delta - state.chain_delta[chain];
  state.chain_delta[chain] = delta;
  state.last_delta = delta;
  state.cumulative_theta += theta;
  state.k = k;
  return theta;
}

// theta(0) = delta(0), drawn on [-(alpha/2) rho, (alpha/2) rho].
inline double InitialNoise(const NoiseParams& p, NoiseState& state) {
  internal::Require(state.k == -1, "initial noise requested on a used state");
  return SubsequenceStep(p, state, 0);
}

// theta(k) = delta(k) - delta(k-1) for k >= 1, plain scheme.
inline double StepNoise(const NoiseParams& p, NoiseState& state, int k) {
  internal::Require(p.h == 1, "step_noise is the h = 1 scheme");
  internal::Require(k >= 1, "step_noise needs k >= 1");
  return SubsequenceStep(p, state, k);
}

// Non-conforming and trivial processes; stateless in (seed, node, k).
inline double BaselineNoise(const NoiseConfig& config, NodeId node, int k) {
  const NoiseParams& p = config.params;
  switch (config.scheme) {
    case NoiseScheme::kIndependentDecaying: {
      const double bound = 0.5 * p.alpha * std::pow(p.rho, k);
      if (bound <= 0.0) return 0.0;
      Stream stream(p.seed, {kBaselineStream, static_cast<std::uint64_t>(node),
                             static_cast<std::uint64_t>(k)});
      return stream.Symmetric(bound);
    }
    case NoiseScheme::kGaussianConstant: {
      Stream stream(p.seed, {kBaselineStream, static_cast<std::uint64_t>(node),
                             static_cast<std::uint64_t>(k)});
      return std::sqrt(config.gaussian_variance) * stream.Normal();
    }
    case NoiseScheme::kZero:
      return 0.0;
    case NoiseScheme::kScda:
      break;
  }
  throw ContractViolation("baseline_noise called with the scda scheme");
}

// Stateful per-node generator used by the engine: yields theta(0), theta(1),
// ... for any scheme.
class NodeNoise {
 public:
  NodeNoise(const NoiseConfig& config, NodeId node)
      : config_(config), state_(FreshNoiseState(config.params, node)) {}

  double Next() {
    const int k = state_.k + 1;
    if (config_.scheme == NoiseScheme::kScda) {
      return SubsequenceStep(config_.params, state_, k);
    }
    const double theta = BaselineNoise(config_, state_.node, k);
    state_.cumulative_theta += theta;
    state_.k = k;
    return theta;
  }

  const NoiseState& state() const { return state_; }

 private:
  NoiseConfig config_;
  NoiseState state_;
};

}  // namespace scda

#endif  // SCDA_NOISE_HPP_
