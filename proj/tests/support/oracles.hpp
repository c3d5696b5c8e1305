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

#ifndef SCDA_TESTS_SUPPORT_ORACLES_HPP_
#define SCDA_TESTS_SUPPORT_ORACLES_HPP_

// Test-only reference computations. Nothing here calls into the engine or
// weight code paths they are used to check.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "scda/noise.hpp"
#include "scda/topology.hpp"

namespace scda::testing {

// Per-node update x_i(k+1) = w_ii x_i+(k) + sum_{j in N_i} w_ij x_j+(k), with
// Metropolis weights derived locally from degrees and the closed
// neighborhood summed in ascending id order.
struct ReferenceRun {
  std::vector<std::vector<double>> x;       // x(0..K)
  std::vector<std::vector<double>> x_plus;  // x+(0..K)
  std::vector<std::vector<double>> theta;   // theta(0..K)
};

inline ReferenceRun RunPerNode(const Graph& g, const std::vector<double>& x0,
                               const NoiseConfig& noise, int rounds) {
  const int n = g.size();
  std::vector<NodeNoise> generators;
  for (NodeId i = 0; i < n; ++i) generators.emplace_back(noise, i);

  auto weight = [&](NodeId i, NodeId j) {
    return 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
  };
  std::vector<double> self_weight(n);
  for (NodeId i = 0; i < n; ++i) {
    double off = 0.0;
    for (NodeId j : g.neighbors(i)) off += weight(i, j);
    self_weight[i] = 1.0 - off;
  }

  ReferenceRun out;
  std::vector<double> x = x0;
  for (int k = 0; k <= rounds; ++k) {
    std::vector<double> theta(n), x_plus(n);
    for (NodeId i = 0; i < n; ++i) {
      theta[i] = generators[i].Next();
      x_plus[i] = x[i] + theta[i];
    }
    out.x.push_back(x);
    out.x_plus.push_back(x_plus);
    out.theta.push_back(theta);
    if (k == rounds) break;
    std::vector<double> next(n);
    for (NodeId i = 0; i < n; ++i) {
      std::vector<NodeId> closed = g.neighbors(i);
      closed.push_back(i);
      std::sort(closed.begin(), closed.end());
      double acc = 0.0;
      for (NodeId j : closed) {
        acc += (j == i ? self_weight[i] : weight(i, j)) * x_plus[j];
      }
      next[i] = acc;
    }
    x = std::move(next);
  }
  return out;
}

// N_j is not a subset of N_i + {i}, via explicit sets.
inline bool PreconditionBySets(const Graph& g, NodeId i, NodeId j) {
  std::set<NodeId> seen(g.neighbors(i).begin(), g.neighbors(i).end());
  seen.insert(i);
  const std::set<NodeId> target(g.neighbors(j).begin(), g.neighbors(j).end());
  return !std::includes(seen.begin(), seen.end(), target.begin(), target.end());
}

// Integer matrix power for rational weight matrices given as numerators over
// a common denominator.
inline std::vector<std::vector<long long>> IntegerPower(
    const std::vector<std::vector<long long>>& m, int exponent) {
  const size_t n = m.size();
  std::vector<std::vector<long long>> out(n, std::vector<long long>(n, 0));
  for (size_t i = 0; i < n; ++i) out[i][i] = 1;
  for (int e = 0; e < exponent; ++e) {
    std::vector<std::vector<long long>> next(n, std::vector<long long>(n, 0));
    for (size_t r = 0; r < n; ++r)
      for (size_t k = 0; k < n; ++k)
        for (size_t c = 0; c < n; ++c) next[r][c] += out[r][k] * m[k][c];
    out = std::move(next);
  }
  return out;
}

// Composite Simpson rule.
inline double Simpson(const std::function<double(double)>& f, double a, double b,
                      int intervals = 2000) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline std::filesystem::path FreshTempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("scda_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void WriteFile(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
}

}  // namespace scda::testing

#endif  // SCDA_TESTS_SUPPORT_ORACLES_HPP_
