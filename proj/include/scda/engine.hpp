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

#ifndef SCDA_ENGINE_HPP_
#define SCDA_ENGINE_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scda/csv.hpp"
#include "scda/error.hpp"
#include "scda/noise.hpp"
#include "scda/tolerances.hpp"
#include "scda/topology.hpp"
#include "scda/weights.hpp"

namespace scda {

// Synchronous noisy consensus.
//
// Round k, for every node: broadcast x+(k) = x(k) + theta(k), then
// x(k+1) = W x+(k). The trace holds rows k = 0..k_stop; the final row also
// carries the last broadcast so that an observer sees x+(0..k_stop).

struct RunConfig {
  Graph graph;
  std::vector<double> x0;
  NoiseConfig noise;
  int max_iterations = 0;    // 0 selects n^2
  double term_epsilon = 0.0; // > 0 enables the neighbor-closeness stop
  std::vector<TopologyEvent> events;  // node ids are original ids
  bool record_trace = true;
};

enum class StopReason { kMaxIterations, kConverged };

inline std::string_view ToString(StopReason r) {
  return r == StopReason::kMaxIterations ? "max_iterations" : "converged";
}

struct TraceRow {
  int k = 0;
  double spread = 0.0;             // V(x(k)) = max - min
  double err = 0.0;                // max_i |x_i(k) - reference_average|
  double reference_average = 0.0;  // mean of the survivors' initial values
  // Populated only when record_trace is set. `ids` are original node ids.
  std::vector<NodeId> ids;
  std::vector<double> x;
  std::vector<double> x_plus;
  std::vector<double> theta;
};

struct AppliedEvent {
  TopologyEvent event;
  bool accepted = false;
  std::string message;
  double reference_average = 0.0;  // after the event
};

struct RunTrace {
  int n = 0;  // initial node count
  std::vector<double> x0;
  std::vector<TraceRow> rows;
  std::vector<AppliedEvent> events;
  int k_stop = 0;
  std::vector<NodeId> final_ids;
  std::vector<double> x_final;
  double consensus_value = 0.0;
  StopReason reason = StopReason::kMaxIterations;
  double bound_m = 0.0;          // state envelope; infinite for unbounded noise
  double max_state_norm = 0.0;   // max_k ||x(k)||_inf
  double max_mass_error = 0.0;   // |sum x(k) - sum x(0) - injected noise|
  bool topology_changed = false;
};

inline double InfNorm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double Spread(std::span<const double> v) {
  if (v.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

inline double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// State envelope M = ||x(0)||_inf + h alpha / (1 - rho). With h = 1 this is
// the plain bound; h sub-sequences inject up to h times the plain mass.
inline double BoundM(std::span<const double> x0, const NoiseParams& params) {
  internal::Require(params.rho < 1.0, "bound_M needs rho < 1");
  return InfNorm(x0) + params.h * params.alpha / (1.0 - params.rho);
}

inline RunTrace Run(const RunConfig& config) {
  Graph graph = config.graph;
  const int n0 = graph.size();
  internal::Require(static_cast<int>(config.x0.size()) == n0,
                    "run: x0 has " + std::to_string(config.x0.size()) +
                        " entries for " + std::to_string(n0) + " nodes");
  internal::Require(config.max_iterations >= 0, "run: max_iterations < 0");
  internal::Require(config.term_epsilon >= 0.0, "run: term_epsilon < 0");
  if (!IsConnected(graph)) throw TopologyError("run: graph is disconnected");
  if (config.noise.scheme != NoiseScheme::kZero) config.noise.params.Validate();

  const int horizon = config.max_iterations > 0 ? config.max_iterations : n0 * n0;

  RunTrace trace;
  trace.n = n0;
  trace.x0 = config.x0;
  switch (config.noise.scheme) {
    case NoiseScheme::kZero:
      trace.bound_m = InfNorm(config.x0);
      break;
    case NoiseScheme::kGaussianConstant:
      trace.bound_m = std::numeric_limits<double>::infinity();
      break;
    default:
      trace.bound_m = BoundM(config.x0, config.noise.params);
  }
  const double bound_slack = Tolerances::kEnvelopeRelative * (1.0 + trace.bound_m);

  std::vector<NodeId> ids(n0);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<NodeNoise> noise;
  noise.reserve(n0);
  for (NodeId i = 0; i < n0; ++i) noise.emplace_back(config.noise, i);

  std::vector<TopologyEvent> events = config.events;
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) {
                     return a.at_iteration < b.at_iteration;
                   });
  size_t next_event = 0;

  WeightMatrix w = Metropolis(graph);
  std::vector<double> x = config.x0;
  std::vector<double> theta(n0), x_plus(n0);
  double reference = Mean(config.x0);
  // Sum of x(0) over survivors plus all noise they injected so far.
  double expected_mass = std::accumulate(x.begin(), x.end(), 0.0);

  auto current_index = [&](NodeId original) {
    auto it = std::lower_bound(ids.begin(), ids.end(), original);
    return (it != ids.end() && *it == original)
               ? static_cast<int>(it - ids.begin())
               : -1;
  };

  for (int k = 0;; ++k) {
    while (next_event < events.size() && events[next_event].at_iteration <= k) {
      const TopologyEvent& original = events[next_event++];
      AppliedEvent applied{original, false, "", reference};
      TopologyEvent local = original;
      local.u = current_index(original.u);
      local.v = original.kind == EventKind::kRemoveNode ? 0
                                                        : current_index(original.v);
      try {
        if (local.u < 0 || local.v < 0) {
          throw TopologyError(std::string(ToString(original.kind)) +
                              ": node no longer present");
        }
        graph = ApplyEvent(graph, local);
        applied.accepted = true;
        trace.topology_changed = true;
        if (original.kind == EventKind::kRemoveNode) {
          expected_mass -= x[local.u];
          ids.erase(ids.begin() + local.u);
          x.erase(x.begin() + local.u);
          std::vector<double> survivors_x0;
          for (NodeId id : ids) survivors_x0.push_back(config.x0[id]);
          reference = Mean(survivors_x0);
        }
        w = Metropolis(graph);
      } catch (const TopologyError& e) {
        applied.message = e.what();
      }
      applied.reference_average = reference;
      trace.events.push_back(std::move(applied));
    }

    const int n = graph.size();
    theta.resize(n);
    x_plus.resize(n);
    double row_err = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(x[i])) {
        throw EngineError("run: non-finite state at k=" + std::to_string(k) +
                          ", node " + std::to_string(ids[i]));
      }
      theta[i] = noise[ids[i]].Next();
      x_plus[i] = x[i] + theta[i];
      row_err = std::max(row_err, std::abs(x[i] - reference));
    }
    const double norm = InfNorm(x);
    trace.max_state_norm = std::max(trace.max_state_norm, norm);
    if (norm > trace.bound_m + bound_slack) {
      throw EngineError("run: ||x(" + std::to_string(k) + ")||_inf = " +
                        FormatDouble(norm) + " exceeds the envelope M = " +
                        FormatDouble(trace.bound_m));
    }
    const double mass = std::accumulate(x.begin(), x.end(), 0.0);
    trace.max_mass_error =
        std::max(trace.max_mass_error, std::abs(mass - expected_mass));

    TraceRow row;
    row.k = k;
    row.spread = Spread(x);
    row.err = row_err;
    row.reference_average = reference;
    if (config.record_trace) {
      row.ids = ids;
      row.x = x;
      row.x_plus = x_plus;
      row.theta = theta;
    }
    trace.rows.push_back(std::move(row));

    bool stop = false;
    if (k >= horizon) {
      trace.reason = StopReason::kMaxIterations;
      stop = true;
    } else if (config.term_epsilon > 0.0) {
      bool close = true;
      for (const Edge& e : graph.edges()) {
        if (std::abs(x[e.a] - x[e.b]) > config.term_epsilon) {
          close = false;
          break;
        }
      }
      if (close) {
        trace.reason = StopReason::kConverged;
        stop = true;
      }
    }
    if (stop) {
      trace.k_stop = k;
      trace.final_ids = ids;
      trace.x_final = x;
      trace.consensus_value = x.front();
      return trace;
    }

    for (double t : theta) expected_mass += t;
    x = Apply(w, x_plus);
  }
}

// ---------------------------------------------------------------------------
// Aggregates

enum class AggregateKind { kSum, kAverage };

// Reads the aggregate off the consensus value of a finished run.
inline double Aggregate(const RunTrace& trace, int n, AggregateKind kind) {
  internal::Require(!trace.rows.empty(), "aggregate: trace is empty");
  return kind == AggregateKind::kAverage ? trace.consensus_value
                                         : n * trace.consensus_value;
}

enum class TransformKind { kProduct, kSecondMoment, kVariance };

// Aggregates a non-additive statistic by running consensus on transformed
// inputs: log x for the product, x^2 for the second moment, and x together
// with x^2 for the variance. `config` supplies graph, noise and stopping
// rules; its x0 is ignored.
inline double TransformAggregate(std::span<const double> x0, TransformKind kind,
                                 const RunConfig& config) {
  const int n = static_cast<int>(x0.size());
  auto average_of = [&](std::vector<double> inputs) {
    RunConfig c = config;
    c.x0 = std::move(inputs);
    c.record_trace = false;
    c.events.clear();
    return Aggregate(Run(c), n, AggregateKind::kAverage);
  };
  std::vector<double> squares(x0.begin(), x0.end());
  for (double& v : squares) v *= v;
  switch (kind) {
    case TransformKind::kProduct: {
      std::vector<double> logs;
      for (double v : x0) {
        if (!(v > 0.0)) {
          throw ContractViolation(
              "transform_aggregate: product needs strictly positive inputs, "
              "got " + FormatDouble(v));
        }
        logs.push_back(std::log(v));
      }
      return std::exp(n * average_of(std::move(logs)));
    }
    case TransformKind::kSecondMoment:
      return average_of(std::move(squares));
    case TransformKind::kVariance: {
      const double mean = average_of(std::vector<double>(x0.begin(), x0.end()));
      return average_of(std::move(squares)) - mean * mean;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Convergence envelope

struct EnvelopePoint {
  int k = 0;       // l + h n
  int offset = 0;  // l in [0, n)
  int blocks = 0;  // h >= 1
  double bound = 0.0;
  double observed = 0.0;
  bool violated = false;
};

// Upper bound on the spread after h blocks of n rounds starting from round l:
//   V(x(l + h n)) <= (1 - eps_w)^h V(x(l))
//                    + a(l) h max{rho^((h-1) n), (1 - eps_w)^(h-1)},
//   a(l) = 2 alpha rho^l (1 - rho^(n+1)) / (1 - rho).
// The trace must come from a static topology with noise bounded by
// alpha rho^k (plain zero-sum, independent decaying, or zero).
inline double SpreadBound(double spread_at_offset, int offset, int blocks, int n,
                          double eps_w, const NoiseParams& params) {
  const double a = 2.0 * params.alpha * std::pow(params.rho, offset) *
                   (1.0 - std::pow(params.rho, n + 1)) / (1.0 - params.rho);
  const double contraction = 1.0 - eps_w;
  return std::pow(contraction, blocks) * spread_at_offset +
         a * blocks *
             std::max(std::pow(params.rho, (blocks - 1) * n),
                      std::pow(contraction, blocks - 1));
}

inline std::vector<EnvelopePoint> DecayEnvelope(const RunTrace& trace, double eps_w,
                                                const NoiseParams& params) {
  internal::Require(!trace.topology_changed,
                    "decay_envelope needs a static-topology trace");
  internal::Require(params.h == 1, "decay_envelope assumes the plain schedule");
  const int n = trace.n;
  const int last = static_cast<int>(trace.rows.size()) - 1;
  std::vector<EnvelopePoint> points;
  for (int offset = 0; offset < n && offset <= last; ++offset) {
    const double v0 = trace.rows[offset].spread;
    for (int blocks = 1; offset + blocks * n <= last; ++blocks) {
      EnvelopePoint p;
      p.offset = offset;
      p.blocks = blocks;
      p.k = offset + blocks * n;
      p.bound = SpreadBound(v0, offset, blocks, n, eps_w, params);
      p.observed = trace.rows[p.k].spread;
      p.violated =
          p.observed > p.bound + Tolerances::kEnvelopeRelative * (1.0 + trace.bound_m);
      points.push_back(p);
    }
  }
  return points;
}

// ---------------------------------------------------------------------------
// CSV export

// Columns k,node_id,x,x_plus,theta; needs a recorded trace.
inline void WriteTraceCsv(std::ostream& out, const RunTrace& trace) {
  out << "k,node_id,x,x_plus,theta\n";
  for (const TraceRow& row : trace.rows) {
    for (size_t i = 0; i < row.ids.size(); ++i) {
      WriteCsvRow(out, {std::to_string(row.k), std::to_string(row.ids[i]),
                        FormatDouble(row.x[i]), FormatDouble(row.x_plus[i]),
                        FormatDouble(row.theta[i])});
    }
  }
}

// Columns k,V,err.
inline void WriteSummaryCsv(std::ostream& out, const RunTrace& trace) {
  out << "k,V,err\n";
  for (const TraceRow& row : trace.rows) {
    WriteCsvRow(out, {std::to_string(row.k), FormatDouble(row.spread),
                      FormatDouble(row.err)});
  }
}

}  // namespace scda

#endif  // SCDA_ENGINE_HPP_
