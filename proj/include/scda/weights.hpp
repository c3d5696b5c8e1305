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

#ifndef SCDA_WEIGHTS_HPP_
#define SCDA_WEIGHTS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "scda/csv.hpp"
#include "scda/error.hpp"
#include "scda/tolerances.hpp"
#include "scda/topology.hpp"

namespace scda {

// Dense row-major n x n matrix of consensus weights.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  explicit WeightMatrix(int n) : n_(n), w_(static_cast<size_t>(n) * n, 0.0) {}

  int size() const { return n_; }
  double operator()(int r, int c) const { return w_[Index(r, c)]; }
  double& operator()(int r, int c) { return w_[Index(r, c)]; }
  std::span<const double> row(int r) const {
    return {w_.data() + static_cast<size_t>(r) * n_, static_cast<size_t>(n_)};
  }

  friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;

 private:
  size_t Index(int r, int c) const { return static_cast<size_t>(r) * n_ + c; }

  int n_ = 0;
  std::vector<double> w_;
};

// Metropolis weights: w_ij = 1 / (1 + max(d_i, d_j)) on edges, the diagonal
// takes the remainder of the row (summed in ascending neighbor order).
inline WeightMatrix Metropolis(const Graph& g) {
  if (!IsConnected(g)) {
    throw TopologyError("metropolis: graph is disconnected");
  }
  const int n = g.size();
  WeightMatrix w(n);
  for (NodeId i = 0; i < n; ++i) {
    double off_diagonal = 0.0;
    for (NodeId j : g.neighbors(i)) {
      const double wij = 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
      w(i, j) = wij;
      off_diagonal += wij;
    }
    w(i, i) = 1.0 - off_diagonal;
  }
  return w;
}

// Matrix-vector product; each output entry accumulates columns in ascending
// order starting from +0.0.
inline std::vector<double> Apply(const WeightMatrix& w,
                                 std::span<const double> v) {
  internal::Require(static_cast<int>(v.size()) == w.size(),
                    "apply: dimension mismatch (" + std::to_string(v.size()) +
                        " vs " + std::to_string(w.size()) + ")");
  std::vector<double> out(v.size());
  for (int r = 0; r < w.size(); ++r) {
    double acc = 0.0;
    const auto row = w.row(r);
    for (size_t c = 0; c < v.size(); ++c) acc += row[c] * v[c];
    out[r] = acc;
  }
  return out;
}

inline WeightMatrix Multiply(const WeightMatrix& a, const WeightMatrix& b) {
  internal::Require(a.size() == b.size(), "multiply: dimension mismatch");
  const int n = a.size();
  WeightMatrix out(n);
  for (int r = 0; r < n; ++r) {
    for (int k = 0; k < n; ++k) {
      const double ark = a(r, k);
      if (ark == 0.0) continue;
      for (int c = 0; c < n; ++c) out(r, c) += ark * b(k, c);
    }
  }
  return out;
}

inline WeightMatrix Power(const WeightMatrix& w, int exponent) {
  WeightMatrix out(w.size());
  for (int i = 0; i < w.size(); ++i) out(i, i) = 1.0;
  for (int e = 0; e < exponent; ++e) out = Multiply(out, w);
  return out;
}

// Contraction constant of W^n: the largest column minimum. For a connected
// graph W^n is entrywise positive, so the value lies in (0, 1], and
// V(W^n y) <= (1 - value) V(y) for every y.
inline double ContractionFactor(const WeightMatrix& w) {
  const int n = w.size();
  const WeightMatrix wn = Power(w, n);
  double best = 0.0;
  for (int c = 0; c < n; ++c) {
    double column_min = std::numeric_limits<double>::infinity();
    for (int r = 0; r < n; ++r) column_min = std::min(column_min, wn(r, c));
    best = std::max(best, column_min);
  }
  return best;
}

// Largest deviation of any row or column sum from 1, and whether the matrix
// is exactly symmetric with entries in [0, 1] respecting the graph pattern.
struct StochasticityReport {
  double max_row_error = 0.0;
  double max_column_error = 0.0;
  bool symmetric = true;
  bool entries_in_unit_interval = true;
  bool respects_pattern = true;
  bool positive_diagonal = true;

  bool ok() const {
    return max_row_error <= Tolerances::kStochastic &&
           max_column_error <= Tolerances::kStochastic && symmetric &&
           entries_in_unit_interval && respects_pattern && positive_diagonal;
  }
};

inline StochasticityReport CheckWeights(const WeightMatrix& w, const Graph& g) {
  StochasticityReport report;
  const int n = w.size();
  for (int r = 0; r < n; ++r) {
    double row_sum = 0.0;
    double column_sum = 0.0;
    for (int c = 0; c < n; ++c) {
      row_sum += w(r, c);
      column_sum += w(c, r);
      if (w(r, c) != w(c, r)) report.symmetric = false;
      if (w(r, c) < 0.0 || w(r, c) > 1.0) report.entries_in_unit_interval = false;
      if (r != c && w(r, c) != 0.0 && !g.HasEdge(r, c)) {
        report.respects_pattern = false;
      }
    }
    if (!(w(r, r) > 0.0)) report.positive_diagonal = false;
    report.max_row_error = std::max(report.max_row_error, std::abs(row_sum - 1.0));
    report.max_column_error =
        std::max(report.max_column_error, std::abs(column_sum - 1.0));
  }
  return report;
}

// Row-major CSV dump, one matrix row per line.
inline void WriteWeightsCsv(std::ostream& out, const WeightMatrix& w) {
  for (int r = 0; r < w.size(); ++r) {
    for (int c = 0; c < w.size(); ++c) {
      if (c) out << ',';
      out << FormatDouble(w(r, c));
    }
    out << '\n';
  }
}

}  // namespace scda

#endif  // SCDA_WEIGHTS_HPP_
