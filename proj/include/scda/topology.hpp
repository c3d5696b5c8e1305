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

#ifndef SCDA_TOPOLOGY_HPP_
#define SCDA_TOPOLOGY_HPP_

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scda/error.hpp"
#include "scda/rng.hpp"
#include "scda/tolerances.hpp"

namespace scda {

using NodeId = int;

// Unordered pair stored with first < second.
struct Edge {
  NodeId a = 0;
  NodeId b = 0;

  Edge() = default;
  Edge(NodeId u, NodeId v) : a(std::min(u, v)), b(std::max(u, v)) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Undirected graph of logical links on dense node ids 0..n-1.
//
// Immutable once built: symmetric by construction, no self-loops, no
// duplicate edges. Connectivity is not enforced here because generators and
// event application need to test candidate graphs; consumers that require a
// connected graph (weights, engine) check IsConnected themselves.
class Graph {
 public:
  Graph() : Graph(1, {}) {}

  Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 1) throw TopologyError("graph needs at least one node");
    for (const Edge& e : edges_) {
      if (e.a == e.b) {
        throw TopologyError("self-loop on node " + std::to_string(e.a));
      }
      if (e.a < 0 || e.b >= n_) {
        throw TopologyError("edge (" + std::to_string(e.a) + "," +
                            std::to_string(e.b) + ") references a node outside 0.." +
                            std::to_string(n_ - 1));
      }
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    neighbors_.assign(n_, {});
    for (const Edge& e : edges_) {
      neighbors_[e.a].push_back(e.b);
      neighbors_[e.b].push_back(e.a);
    }
    for (auto& list : neighbors_) std::sort(list.begin(), list.end());
  }

  int size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  // Ascending neighbor ids of `i`.
  const std::vector<NodeId>& neighbors(NodeId i) const { return neighbors_.at(i); }
  int degree(NodeId i) const { return static_cast<int>(neighbors_.at(i).size()); }

  bool HasEdge(NodeId u, NodeId v) const {
    if (u < 0 || v < 0 || u >= n_ || v >= n_) return false;
    const auto& list = neighbors_[u];
    return std::binary_search(list.begin(), list.end(), v);
  }

  friend bool operator==(const Graph& x, const Graph& y) {
    return x.n_ == y.n_ && x.edges_ == y.edges_;
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> neighbors_;
};

// A single breadth-first traversal from node 0 reaches every node.
inline bool IsConnected(const Graph& g) {
  std::vector<char> seen(g.size(), 0);
  std::vector<NodeId> frontier{0};
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    NodeId u = frontier.back();
    frontier.pop_back();
    for (NodeId v : g.neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push_back(v);
      }
    }
  }
  return reached == g.size();
}

// ---------------------------------------------------------------------------
// Generators

enum class GraphKind { kRing, kPath, kComplete, kRandomGnp, kRandomGeometric };

inline std::string_view ToString(GraphKind kind) {
  switch (kind) {
    case GraphKind::kRing: return "ring";
    case GraphKind::kPath: return "path";
    case GraphKind::kComplete: return "complete";
    case GraphKind::kRandomGnp: return "random_gnp";
    case GraphKind::kRandomGeometric: return "random_geometric";
  }
  return "?";
}

inline GraphKind ParseGraphKind(std::string_view name) {
  for (GraphKind k : {GraphKind::kRing, GraphKind::kPath, GraphKind::kComplete,
                      GraphKind::kRandomGnp, GraphKind::kRandomGeometric}) {
    if (ToString(k) == name) return k;
  }
  throw ConfigError("topology.kind: unknown graph kind '" + std::string(name) +
                    "'");
}

// Kind-specific knobs. `p` is the G(n,p) edge probability, `radius` the
// connection radius of a random geometric graph in the unit square.
struct GeneratorParams {
  double p = 0.3;
  double radius = 0.4;
};

namespace internal {

inline std::vector<Edge> DrawGnp(int n, double p, Stream& stream) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (stream.Uniform() < p) edges.emplace_back(i, j);
    }
  }
  return edges;
}

inline std::vector<Edge> DrawGeometric(int n, double radius, Stream& stream) {
  std::vector<std::pair<double, double>> points(n);
  for (auto& [x, y] : points) {
    x = stream.Uniform();
    y = stream.Uniform();
  }
  std::vector<Edge> edges;
  const double r2 = radius * radius;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const double dx = points[i].first - points[j].first;
      const double dy = points[i].second - points[j].second;
      if (dx * dx + dy * dy <= r2) edges.emplace_back(i, j);
    }
  }
  return edges;
}

}  // namespace internal

// Builds a connected graph of the given kind. Random kinds are redrawn from
// independent sub-streams of `seed` until connected, up to
// Tolerances::kGeneratorRetries attempts; after that a TopologyError is
// thrown rather than patching connectivity.
inline Graph Generate(GraphKind kind, int n, const GeneratorParams& params,
                      std::uint64_t seed) {
  if (n < 1) throw TopologyError("generate: n must be >= 1");
  std::vector<Edge> edges;
  switch (kind) {
    case GraphKind::kPath:
      for (NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      return Graph(n, std::move(edges));
    case GraphKind::kRing:
      for (NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      if (n >= 3) edges.emplace_back(0, n - 1);
      return Graph(n, std::move(edges));
    case GraphKind::kComplete:
      for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) edges.emplace_back(i, j);
      }
      return Graph(n, std::move(edges));
    case GraphKind::kRandomGnp:
      if (!(params.p >= 0.0 && params.p <= 1.0)) {
        throw TopologyError("generate: p must be in [0,1]");
      }
      break;
    case GraphKind::kRandomGeometric:
      if (!(params.radius >= 0.0)) {
        throw TopologyError("generate: radius must be >= 0");
      }
      break;
  }
  for (int attempt = 0; attempt < Tolerances::kGeneratorRetries; ++attempt) {
    Stream stream(seed, {static_cast<std::uint64_t>(attempt)});
    Graph g(n, kind == GraphKind::kRandomGnp
                   ? internal::DrawGnp(n, params.p, stream)
                   : internal::DrawGeometric(n, params.radius, stream));
    if (IsConnected(g)) return g;
  }
  throw TopologyError("generate: " + std::string(ToString(kind)) + " with n=" +
                      std::to_string(n) + " stayed disconnected after " +
                      std::to_string(Tolerances::kGeneratorRetries) +
                      " draws");
}

// ---------------------------------------------------------------------------
// Dynamics

enum class EventKind { kRemoveEdge, kAddEdge, kRemoveNode };

inline std::string_view ToString(EventKind kind) {
  switch (kind) {
    case EventKind::kRemoveEdge: return "remove_edge";
    case EventKind::kAddEdge: return "add_edge";
    case EventKind::kRemoveNode: return "remove_node";
  }
  return "?";
}

// A topology change applied before the update of round `at_iteration`.
// Node payloads refer to the ids of the graph the event is applied to; for
// edge events both `u` and `v` are used, for node removal only `u`.
struct TopologyEvent {
  int at_iteration = 0;
  EventKind kind = EventKind::kRemoveEdge;
  NodeId u = 0;
  NodeId v = 0;

  friend bool operator==(const TopologyEvent&, const TopologyEvent&) = default;
};

// Applies `event` and returns the resulting graph. Node removal relabels the
// survivors densely, preserving relative order. Throws TopologyError when the
// result would be disconnected or the payload is invalid.
inline Graph ApplyEvent(const Graph& g, const TopologyEvent& event) {
  const int n = g.size();
  auto check_node = [&](NodeId id) {
    if (id < 0 || id >= n) {
      throw TopologyError(std::string(ToString(event.kind)) + ": node " +
                          std::to_string(id) + " does not exist");
    }
  };
  check_node(event.u);
  Graph result;
  switch (event.kind) {
    case EventKind::kRemoveEdge: {
      check_node(event.v);
      if (!g.HasEdge(event.u, event.v)) {
        throw TopologyError("remove_edge: (" + std::to_string(event.u) + "," +
                            std::to_string(event.v) + ") is not an edge");
      }
      std::vector<Edge> edges;
      const Edge target(event.u, event.v);
      for (const Edge& e : g.edges()) {
        if (e != target) edges.push_back(e);
      }
      result = Graph(n, std::move(edges));
      break;
    }
    case EventKind::kAddEdge: {
      check_node(event.v);
      if (event.u == event.v) throw TopologyError("add_edge: self-loop");
      std::vector<Edge> edges = g.edges();
      edges.emplace_back(event.u, event.v);
      result = Graph(n, std::move(edges));
      break;
    }
    case EventKind::kRemoveNode: {
      if (n == 1) throw TopologyError("remove_node: cannot remove the last node");
      std::vector<Edge> edges;
      auto relabel = [&](NodeId id) { return id > event.u ? id - 1 : id; };
      for (const Edge& e : g.edges()) {
        if (e.a == event.u || e.b == event.u) continue;
        edges.emplace_back(relabel(e.a), relabel(e.b));
      }
      result = Graph(n - 1, std::move(edges));
      break;
    }
  }
  if (!IsConnected(result)) {
    throw TopologyError(std::string(ToString(event.kind)) +
                        " rejected: the graph would become disconnected");
  }
  return result;
}

// True iff node j has a neighbor whose broadcasts node i does not observe,
// i.e. N_j is not a subset of N_i + {i}.
inline bool CheckPrivacyPrecondition(const Graph& g, NodeId i, NodeId j) {
  if (!g.HasEdge(i, j)) {
    throw ContractViolation("privacy precondition: " + std::to_string(j) +
                            " is not a neighbor of " + std::to_string(i));
  }
  for (NodeId l : g.neighbors(j)) {
    if (l != i && !g.HasEdge(i, l)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Edge-list text format: first line `n`, then one `i j` pair per line with
// i < j, pairs in ascending order.

inline void WriteEdgeList(std::ostream& out, const Graph& g) {
  out << g.size() << '\n';
  for (const Edge& e : g.edges()) out << e.a << ' ' << e.b << '\n';
}

inline Graph ReadEdgeList(std::istream& in) {
  std::string line;
  int n = 0;
  bool have_n = false;
  std::vector<Edge> edges;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    if (!have_n) {
      if (!(fields >> n)) {
        throw TopologyError("edge list line " + std::to_string(line_no) +
                            ": expected node count");
      }
      have_n = true;
      continue;
    }
    NodeId a = 0, b = 0;
    if (!(fields >> a >> b)) {
      throw TopologyError("edge list line " + std::to_string(line_no) +
                          ": expected 'i j'");
    }
    std::string rest;
    if (fields >> rest) {
      throw TopologyError("edge list line " + std::to_string(line_no) +
                          ": trailing text");
    }
    edges.emplace_back(a, b);
    if (a == b) throw TopologyError("self-loop on node " + std::to_string(a));
  }
  if (!have_n) throw TopologyError("edge list is empty");
  return Graph(n, std::move(edges));
}

inline std::string ToEdgeList(const Graph& g) {
  std::ostringstream out;
  WriteEdgeList(out, g);
  return out.str();
}

}  // namespace scda

#endif  // SCDA_TOPOLOGY_HPP_
