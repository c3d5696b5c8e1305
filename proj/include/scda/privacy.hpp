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

#ifndef SCDA_PRIVACY_HPP_
#define SCDA_PRIVACY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scda/csv.hpp"
#include "scda/engine.hpp"
#include "scda/error.hpp"
#include "scda/noise.hpp"
#include "scda/rng.hpp"
#include "scda/topology.hpp"
#include "scda/weights.hpp"

namespace scda {

// (epsilon, sigma)-data-privacy.
//
// sigma(epsilon) is the largest probability mass the initial-noise density
// puts on any window of half-width epsilon centred in its support. The
// attacks below estimate a neighbor's initial value from what an
// honest-but-curious node actually observes and report empirical success
// frequencies to compare against sigma.

struct PrivacyQuery {
  double epsilon = 0.1;
  NoiseParams params;
};

namespace internal {

inline double StandardNormalCdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Mass of theta(0) on [lo, hi] for the configured distribution on
// [-b, b], b = (alpha/2) rho.
inline double InitialNoiseMass(const NoiseParams& p, double lo, double hi) {
  const double b = 0.5 * p.alpha * p.rho;
  lo = std::max(lo, -b);
  hi = std::min(hi, b);
  if (hi <= lo) return 0.0;
  if (p.distribution == NoiseDistribution::kUniform) return (hi - lo) / (2.0 * b);
  const double s = 0.5 * b;
  const double z = StandardNormalCdf(b / s) - StandardNormalCdf(-b / s);
  return (StandardNormalCdf(hi / s) - StandardNormalCdf(lo / s)) / z;
}

}  // namespace internal

// True when the initial noise interval is degenerate and sigma is 1 by
// convention.
inline bool NoiselessInitialRound(const NoiseParams& p) {
  return !(p.alpha * p.rho > 0.0);
}

inline double SigmaAnalytic(const PrivacyQuery& q) {
  internal::Require(q.epsilon > 0.0, "sigma: epsilon must be > 0");
  const NoiseParams& p = q.params;
  if (NoiselessInitialRound(p)) return 1.0;
  const double width = p.alpha * p.rho;
  if (p.distribution == NoiseDistribution::kUniform) {
    return std::min(2.0 * q.epsilon, width) / width;
  }
  // Sliding-window maximization: coarse grid over the centre, then golden
  // section around the best grid point.
  const double b = 0.5 * width;
  auto mass = [&](double nu) {
    return internal::InitialNoiseMass(p, nu - q.epsilon, nu + q.epsilon);
  };
  constexpr int kGrid = 2000;
  double best_nu = -b;
  double best = mass(-b);
  for (int g = 1; g <= kGrid; ++g) {
    const double nu = -b + 2.0 * b * g / kGrid;
    const double m = mass(nu);
    if (m > best) {
      best = m;
      best_nu = nu;
    }
  }
  double lo = std::max(-b, best_nu - 2.0 * b / kGrid);
  double hi = std::min(b, best_nu + 2.0 * b / kGrid);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100; ++it) {
    const double m1 = hi - ratio * (hi - lo);
    const double m2 = lo + ratio * (hi - lo);
    if (mass(m1) < mass(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  return std::clamp(std::max(best, mass(0.5 * (lo + hi))), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Adversary view

// What node `observer` has seen about node `target` by round `horizon`: its
// own states and broadcasts and the broadcasts of its own neighbors. When
// `knows_target_neighbors` is set the adversary is additionally told N_j and
// the weight row of the target.
struct AdversaryView {
  NodeId observer = 0;
  NodeId target = 0;
  int horizon = 0;
  bool knows_target_neighbors = false;
  std::vector<double> own_x;
  std::map<NodeId, std::vector<double>> broadcasts;  // keys: N_i + {i}
  std::vector<std::pair<NodeId, double>> target_row;  // (l, w_jl), l in N_j + {j}
};

inline AdversaryView MakeView(const Graph& g, const RunTrace& trace,
                              NodeId observer, NodeId target,
                              bool knows_target_neighbors) {
  internal::Require(!trace.topology_changed, "view: trace must be static");
  internal::Require(!trace.rows.empty() && !trace.rows.front().ids.empty(),
                    "view: trace was not recorded");
  internal::Require(g.HasEdge(observer, target),
                    "view: target is not a neighbor of the observer");
  AdversaryView view;
  view.observer = observer;
  view.target = target;
  view.horizon = trace.k_stop;
  view.knows_target_neighbors = knows_target_neighbors;
  std::vector<NodeId> observed = g.neighbors(observer);
  observed.push_back(observer);
  for (NodeId l : observed) view.broadcasts[l].reserve(trace.rows.size());
  for (const TraceRow& row : trace.rows) {
    view.own_x.push_back(row.x[observer]);
    for (NodeId l : observed) view.broadcasts[l].push_back(row.x_plus[l]);
  }
  if (knows_target_neighbors) {
    const WeightMatrix w = Metropolis(g);
    std::vector<NodeId> closed = g.neighbors(target);
    closed.push_back(target);
    std::sort(closed.begin(), closed.end());
    for (NodeId l : closed) view.target_row.emplace_back(l, w(target, l));
  }
  return view;
}

// ---------------------------------------------------------------------------
// Attacks

// Shared description of a repeated attack experiment. Each trial draws fresh
// initial values uniformly from [-prior_half_width, prior_half_width] and a
// fresh noise seed, both derived from `seed` and the trial index.
struct AttackSetup {
  Graph graph;
  NoiseConfig noise;
  NodeId observer = 0;
  NodeId target = 1;
  double prior_half_width = 100.0;
  std::uint64_t seed = 0;
};

struct AttackResult {
  int trials = 0;
  int successes = 0;
  double rate = 0.0;
  double std_error = 0.0;  // sqrt(rate (1 - rate) / trials)
};

namespace internal {

inline RunTrace AttackTrial(const AttackSetup& setup, int rounds,
                            std::uint64_t phase, int trial) {
  const int n = setup.graph.size();
  RunConfig config;
  config.graph = setup.graph;
  config.noise = setup.noise;
  config.noise.params.seed =
      DeriveSeed(setup.seed, {phase, static_cast<std::uint64_t>(trial), 2});
  config.max_iterations = std::max(rounds, 1);
  Stream prior(setup.seed, {phase, static_cast<std::uint64_t>(trial), 1});
  config.x0.resize(n);
  for (double& v : config.x0) {
    v = prior.Uniform(-setup.prior_half_width, setup.prior_half_width);
  }
  return Run(config);
}

inline AttackResult Tally(int trials, int successes) {
  AttackResult r;
  r.trials = trials;
  r.successes = successes;
  r.rate = trials > 0 ? static_cast<double>(successes) / trials : 0.0;
  r.std_error = trials > 0 ? std::sqrt(r.rate * (1.0 - r.rate) / trials) : 0.0;
  return r;
}

inline constexpr std::uint64_t kEvaluationPhase = 0;
inline constexpr std::uint64_t kTrainingPhase = 1;

}  // namespace internal

// Estimates x_j(0) by the first broadcast x_j+(0), i.e. guesses
// theta_j(0) = 0.
inline AttackResult NaiveAttack(const AttackSetup& setup, int trials,
                                double epsilon) {
  internal::Require(trials >= 1, "naive_attack: trials must be >= 1");
  internal::Require(epsilon > 0.0, "naive_attack: epsilon must be > 0");
  int successes = 0;
  for (int t = 0; t < trials; ++t) {
    const RunTrace trace =
        internal::AttackTrial(setup, 0, internal::kEvaluationPhase, t);
    const AdversaryView view =
        MakeView(setup.graph, trace, setup.observer, setup.target, false);
    const double estimate = view.broadcasts.at(setup.target)[0];
    if (std::abs(estimate - trace.x0[setup.target]) <= epsilon) ++successes;
  }
  return internal::Tally(trials, successes);
}

// Centre of the densest window of half-width `epsilon` over `samples`.
inline double DensestWindowCentre(std::vector<double> samples, double epsilon) {
  internal::Require(!samples.empty(), "densest window: no samples");
  std::sort(samples.begin(), samples.end());
  size_t best_start = 0, best_count = 0, hi = 0;
  for (size_t lo = 0; lo < samples.size(); ++lo) {
    hi = std::max(hi, lo);
    while (hi < samples.size() && samples[hi] - samples[lo] <= 2.0 * epsilon) ++hi;
    if (hi - lo > best_count) {
      best_count = hi - lo;
      best_start = lo;
    }
  }
  return samples[best_start] + epsilon;
}

// Estimates x_j(0) from the round-k broadcast minus a constant guess of the
// compound noise x_j+(k) - x_j(0). The guess is the densest-window centre of
// that compound noise over `training_trials` independent offline runs.
// Refuses targets whose neighborhood the observer fully covers.
inline AttackResult LaterRoundAttack(const AttackSetup& setup, int round,
                                     int trials, double epsilon,
                                     int training_trials = 0) {
  internal::Require(round >= 0, "later_round_attack: round must be >= 0");
  if (!CheckPrivacyPrecondition(setup.graph, setup.observer, setup.target)) {
    throw AttackRefused(
        "later_round_attack: observer sees every neighbor of the target; use "
        "the disclosure attack");
  }
  if (round == 0) return NaiveAttack(setup, trials, epsilon);
  internal::Require(trials >= 1, "later_round_attack: trials must be >= 1");
  if (training_trials <= 0) training_trials = trials;

  std::vector<double> compound;
  compound.reserve(training_trials);
  for (int t = 0; t < training_trials; ++t) {
    const RunTrace trace =
        internal::AttackTrial(setup, round, internal::kTrainingPhase, t);
    compound.push_back(trace.rows[round].x_plus[setup.target] -
                       trace.x0[setup.target]);
  }
  const double guess = DensestWindowCentre(std::move(compound), epsilon);

  int successes = 0;
  for (int t = 0; t < trials; ++t) {
    const RunTrace trace =
        internal::AttackTrial(setup, round, internal::kEvaluationPhase, t);
    const AdversaryView view =
        MakeView(setup.graph, trace, setup.observer, setup.target, false);
    const double estimate = view.broadcasts.at(setup.target)[round] - guess;
    if (std::abs(estimate - trace.x0[setup.target]) <= epsilon) ++successes;
  }
  return internal::Tally(trials, successes);
}

struct DisclosureResult {
  double estimate = 0.0;
  std::vector<double> reconstructed_theta;  // theta_j(1..K)
};

// Reconstructs theta_j(k) = x_j+(k) - sum_l w_jl x_l+(k-1) for k = 1..K and
// returns x_j+(0) + sum_k theta_j(k). Requires the adversary to know the
// target's weight row and to observe every broadcast it depends on.
inline DisclosureResult DisclosureAttack(const AdversaryView& view, int horizon) {
  if (!view.knows_target_neighbors) {
    throw AttackRefused("disclosure_attack: adversary does not know N_j");
  }
  for (const auto& [l, weight] : view.target_row) {
    if (!view.broadcasts.contains(l)) {
      throw AttackRefused("disclosure_attack: broadcasts of node " +
                          std::to_string(l) + " are not observed");
    }
  }
  internal::Require(horizon >= 0 && horizon <= view.horizon,
                    "disclosure_attack: horizon beyond the observed rounds");
  const std::vector<double>& target = view.broadcasts.at(view.target);
  DisclosureResult result;
  double correction = 0.0;
  for (int k = 1; k <= horizon; ++k) {
    double state = 0.0;
    for (const auto& [l, weight] : view.target_row) {
      state += weight * view.broadcasts.at(l)[k - 1];
    }
    const double theta = target[k] - state;
    result.reconstructed_theta.push_back(theta);
    correction += theta;
  }
  result.estimate = target[0] + correction;
  return result;
}

// Guaranteed disclosure error after K rounds: the untelescoped remainder
// |delta_j(K)| <= (alpha/2) rho^(K+1).
inline double DisclosureErrorBound(const NoiseParams& p, int horizon) {
  return DeltaEnvelope(p, horizon);
}

// ---------------------------------------------------------------------------
// Reports

struct PrivacyReport {
  double epsilon = 0.0;
  double sigma_analytic = 0.0;
  double sigma_empirical = 0.0;
  int trials = 0;
  double std_error = 0.0;
  std::string attack_kind;
};

// sigma-versus-epsilon table using the naive estimator.
inline std::vector<PrivacyReport> PrivacySweep(const AttackSetup& setup,
                                               std::span<const double> epsilons,
                                               int trials) {
  std::vector<PrivacyReport> reports;
  for (double eps : epsilons) {
    const AttackResult r = NaiveAttack(setup, trials, eps);
    reports.push_back({eps, SigmaAnalytic({eps, setup.noise.params}), r.rate,
                       r.trials, r.std_error, "naive"});
  }
  return reports;
}

inline void WritePrivacyCsv(std::ostream& out,
                            std::span<const PrivacyReport> reports) {
  out << "epsilon,sigma_analytic,sigma_empirical,trials,stderr,attack_kind\n";
  for (const PrivacyReport& r : reports) {
    WriteCsvRow(out, {FormatDouble(r.epsilon), FormatDouble(r.sigma_analytic),
                      FormatDouble(r.sigma_empirical), std::to_string(r.trials),
                      FormatDouble(r.std_error), r.attack_kind});
  }
}

}  // namespace scda

#endif  // SCDA_PRIVACY_HPP_
