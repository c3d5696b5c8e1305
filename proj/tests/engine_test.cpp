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

#include "scda/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "scda/weights.hpp"
#include "support/oracles.hpp"

namespace scda {
namespace {

RunConfig Config(const Graph& g, std::vector<double> x0, NoiseScheme scheme,
                 double alpha = 1.0, double rho = 0.9, std::uint64_t seed = 0) {
  RunConfig c;
  c.graph = g;
  c.x0 = std::move(x0);
  c.noise.scheme = scheme;
  c.noise.params.alpha = alpha;
  c.noise.params.rho = rho;
  c.noise.params.seed = seed;
  return c;
}

std::vector<double> RandomX0(int n, std::uint64_t seed, double lo = 0.0,
                             double hi = 100.0) {
  Stream s(seed, {5});
  std::vector<double> x(n);
  for (double& v : x) v = s.Uniform(lo, hi);
  return x;
}

TEST(RunTest, CompleteOfTwoAveragesInOneStep) {
  RunConfig c = Config(Generate(GraphKind::kComplete, 2, {}, 0), {0.0, 2.0},
                       NoiseScheme::kZero);
  c.max_iterations = 1;
  const RunTrace t = scda::Run(c);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1].x, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(t.rows[1].err, 0.0);
  EXPECT_EQ(t.rows[0].err, 1.0);
  EXPECT_EQ(t.k_stop, 1);
}

TEST(RunTest, ConstantStateIsAFixedPoint) {
  for (GraphKind kind : {GraphKind::kRing, GraphKind::kPath, GraphKind::kComplete}) {
    RunConfig c = Config(Generate(kind, 7, {}, 0), std::vector<double>(7, 4.5),
                         NoiseScheme::kZero);
    const RunTrace t = scda::Run(c);
    for (const TraceRow& row : t.rows) {
      for (double v : row.x) EXPECT_NEAR(v, 4.5, 1e-13);
    }
  }
}

TEST(RunTest, DefaultHorizonIsNSquared) {
  const RunTrace t = scda::Run(Config(Generate(GraphKind::kRing, 6, {}, 0),
                                RandomX0(6, 1), NoiseScheme::kScda, 1.0, 0.9, 4));
  EXPECT_EQ(t.k_stop, 36);
  EXPECT_EQ(t.rows.size(), 37u);
  EXPECT_EQ(t.reason, StopReason::kMaxIterations);
}

TEST(RunTest, PathOfThreeMatchesThePerNodeReference) {
  RunConfig c = Config(Generate(GraphKind::kPath, 3, {}, 0), {1.0, 2.0, 3.0},
                       NoiseScheme::kScda, 1.0, 0.9, 42);
  c.max_iterations = 81;
  const RunTrace t = scda::Run(c);
  const testing::ReferenceRun ref = testing::RunPerNode(c.graph, c.x0, c.noise, 81);
  ASSERT_EQ(t.rows.size(), ref.x.size());
  for (size_t k = 0; k < t.rows.size(); ++k) {
    EXPECT_EQ(t.rows[k].x, ref.x[k]) << "k=" << k;
    EXPECT_EQ(t.rows[k].x_plus, ref.x_plus[k]) << "k=" << k;
    EXPECT_EQ(t.rows[k].theta, ref.theta[k]) << "k=" << k;
  }
  // err <= V + |mean offset|, with V under the geometric envelope.
  const double eps = ContractionFactor(Metropolis(c.graph));
  const double v_bound = SpreadBound(t.rows[0].spread, 0, 27, 3, eps, c.noise.params);
  const double err_bound = v_bound + 0.5 * std::pow(0.9, 81);
  EXPECT_LE(t.rows[81].err, err_bound);
  EXPECT_LT(t.rows[81].err, 1e-2);
}

TEST(RunTest, ReplayIsBitwise) {
  RunConfig c = Config(Generate(GraphKind::kRandomGnp, 15, {0.3, 0.4}, 8),
                       RandomX0(15, 2), NoiseScheme::kScda, 1.0, 0.9, 99);
  const RunTrace a = scda::Run(c);
  const RunTrace b = scda::Run(c);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (size_t k = 0; k < a.rows.size(); ++k) {
    EXPECT_EQ(a.rows[k].x, b.rows[k].x);
    EXPECT_EQ(a.rows[k].theta, b.rows[k].theta);
  }
  std::ostringstream csv_a, csv_b;
  WriteTraceCsv(csv_a, a);
  WriteTraceCsv(csv_b, b);
  EXPECT_EQ(csv_a.str(), csv_b.str());
}

TEST(RunTest, MassIsConservedUpToInjectedNoise) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 20;
    RunConfig c = Config(Generate(GraphKind::kRandomGnp, n, {0.3, 0.4}, seed),
                         RandomX0(n, seed), NoiseScheme::kScda, 1.0, 0.9, seed);
    const RunTrace t = scda::Run(c);
    EXPECT_LE(t.max_mass_error, n * t.k_stop * 1e-12);
    // Independently: sum x(k) against sum x(0) plus all noise before k.
    double injected = 0.0;
    const double start = std::accumulate(c.x0.begin(), c.x0.end(), 0.0);
    for (const TraceRow& row : t.rows) {
      const double mass = std::accumulate(row.x.begin(), row.x.end(), 0.0);
      EXPECT_NEAR(mass, start + injected, n * std::max(row.k, 1) * 1e-12);
      for (double th : row.theta) injected += th;
    }
  }
}

TEST(RunTest, StateStaysWithinBoundM) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RunConfig c = Config(Generate(GraphKind::kRing, 5, {}, 0), RandomX0(5, seed, -5, 5),
                         NoiseScheme::kScda, 3.0, 0.95, seed);
    c.max_iterations = 300;
    const RunTrace t = scda::Run(c);
    EXPECT_LE(t.max_state_norm, t.bound_m);
    EXPECT_EQ(t.bound_m, BoundM(c.x0, c.noise.params));
  }
}

TEST(RunTest, TerminationRule) {
  RunConfig c = Config(Generate(GraphKind::kComplete, 5, {}, 0), RandomX0(5, 3),
                       NoiseScheme::kZero);
  c.max_iterations = 1000;
  c.term_epsilon = 1e-6;
  const RunTrace t = scda::Run(c);
  EXPECT_EQ(t.reason, StopReason::kConverged);
  EXPECT_LT(t.k_stop, 1000);
  for (const Edge& e : c.graph.edges()) {
    EXPECT_LE(std::abs(t.x_final[e.a] - t.x_final[e.b]), 1e-6);
  }
}

TEST(RunTest, RejectsInvalidInput) {
  const Graph g = Generate(GraphKind::kPath, 3, {}, 0);
  EXPECT_THROW(scda::Run(Config(g, {1.0, 2.0}, NoiseScheme::kZero)), ContractViolation);
  EXPECT_THROW(scda::Run(Config(Graph(3, {{0, 1}}), {1.0, 2.0, 3.0}, NoiseScheme::kZero)),
               TopologyError);
  EXPECT_THROW(scda::Run(Config(g, {1.0, 2.0, 3.0}, NoiseScheme::kScda, 1.0, 1.0, 1)),
               ConfigError);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(scda::Run(Config(g, {1.0, inf, 3.0}, NoiseScheme::kZero)), EngineError);
  EXPECT_THROW(scda::Run(Config(g, {1.0, std::nan(""), 3.0}, NoiseScheme::kZero)),
               EngineError);
}

TEST(RunTest, GaussianConstantNoiseDoesNotSettle) {
  RunConfig c = Config(Generate(GraphKind::kRing, 8, {}, 0), RandomX0(8, 4),
                       NoiseScheme::kGaussianConstant, 1.0, 0.9, 4);
  c.max_iterations = 500;
  const RunTrace t = scda::Run(c);
  EXPECT_TRUE(std::isinf(t.bound_m));
  double late_spread = 0.0;
  for (size_t k = 400; k < t.rows.size(); ++k) late_spread += t.rows[k].spread;
  EXPECT_GT(late_spread / 101.0, 0.1);
}

TEST(RunTest, IndependentDecayingLimitIsShiftedByTheNoise) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int n = 10;
    RunConfig c = Config(Generate(GraphKind::kRandomGnp, n, {0.4, 0.4}, seed),
                         RandomX0(n, seed), NoiseScheme::kIndependentDecaying, 1.0,
                         0.8, seed);
    c.max_iterations = 600;
    const RunTrace t = scda::Run(c);
    double total = 0.0;
    for (const TraceRow& row : t.rows) {
      for (double th : row.theta) total += th;
    }
    // The last round's noise never enters x; it is below 1e-58 here.
    const double predicted = Mean(c.x0) + total / n;
    for (double v : t.x_final) EXPECT_NEAR(v, predicted, 1e-9);
  }
}

TEST(RunTest, RemovingANodeResetsTheReferenceAverage) {
  RunConfig c = Config(Generate(GraphKind::kComplete, 4, {}, 0), {1.0, 2.0, 3.0, 10.0},
                       NoiseScheme::kZero);
  c.max_iterations = 50;
  c.events = {{0, EventKind::kRemoveNode, 3, 0}};
  const RunTrace t = scda::Run(c);
  ASSERT_EQ(t.events.size(), 1u);
  EXPECT_TRUE(t.events[0].accepted);
  EXPECT_DOUBLE_EQ(t.events[0].reference_average, 2.0);
  EXPECT_EQ(t.final_ids, (std::vector<NodeId>{0, 1, 2}));
  EXPECT_NEAR(t.consensus_value, 2.0, 1e-12);
  EXPECT_TRUE(t.topology_changed);
}

TEST(RunTest, LateRemovalLosesExactness) {
  RunConfig c = Config(Generate(GraphKind::kRing, 6, {}, 0),
                       {10.0, 20.0, 30.0, 40.0, 50.0, 60.0}, NoiseScheme::kZero);
  c.max_iterations = 300;
  c.events = {{80, EventKind::kRemoveNode, 5, 0}};
  const RunTrace t = scda::Run(c);
  EXPECT_DOUBLE_EQ(t.rows.back().reference_average, 30.0);
  EXPECT_GT(t.rows.back().err, 1.0);
}

TEST(RunTest, RejectedEventsAreRecordedAndTheRunContinues) {
  RunConfig c = Config(Generate(GraphKind::kPath, 4, {}, 0), {1.0, 2.0, 3.0, 4.0},
                       NoiseScheme::kScda, 1.0, 0.9, 3);
  c.max_iterations = 40;
  c.events = {{5, EventKind::kRemoveEdge, 1, 2}, {10, EventKind::kAddEdge, 0, 3}};
  const RunTrace t = scda::Run(c);
  ASSERT_EQ(t.events.size(), 2u);
  EXPECT_FALSE(t.events[0].accepted);
  EXPECT_NE(t.events[0].message.find("disconnected"), std::string::npos);
  EXPECT_TRUE(t.events[1].accepted);
  EXPECT_EQ(t.k_stop, 40);
}

TEST(RunTest, EventsUseOriginalNodeIds) {
  RunConfig c = Config(Generate(GraphKind::kComplete, 5, {}, 0), RandomX0(5, 9),
                       NoiseScheme::kZero);
  c.max_iterations = 30;
  c.events = {{2, EventKind::kRemoveNode, 1, 0}, {4, EventKind::kRemoveEdge, 3, 4},
              {6, EventKind::kRemoveNode, 1, 0}};
  const RunTrace t = scda::Run(c);
  ASSERT_EQ(t.events.size(), 3u);
  EXPECT_TRUE(t.events[0].accepted);
  EXPECT_TRUE(t.events[1].accepted);
  EXPECT_FALSE(t.events[2].accepted);
  EXPECT_EQ(t.final_ids, (std::vector<NodeId>{0, 2, 3, 4}));
}

TEST(AggregateTest, AverageAndSum) {
  RunConfig c = Config(Generate(GraphKind::kComplete, 3, {}, 0), {1.0, 2.0, 3.0},
                       NoiseScheme::kZero);
  c.max_iterations = 20;
  const RunTrace t = scda::Run(c);
  EXPECT_NEAR(Aggregate(t, 3, AggregateKind::kAverage), 2.0, 1e-12);
  EXPECT_NEAR(Aggregate(t, 3, AggregateKind::kSum), 6.0, 1e-12);
}

TEST(AggregateTest, SingleNode) {
  const RunTrace t = scda::Run(Config(Graph(1, {}), {7.25}, NoiseScheme::kZero));
  EXPECT_EQ(Aggregate(t, 1, AggregateKind::kSum), 7.25);
}

TEST(AggregateTest, SumOnTwentyNodesMatchesDirectSummation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::vector<double> x0 = RandomX0(20, seed, -100, 100);
    RunConfig c = Config(Generate(GraphKind::kRandomGnp, 20, {0.3, 0.4}, seed), x0,
                         NoiseScheme::kZero);
    c.max_iterations = 400;
    double direct = 0.0;
    for (double v : x0) direct += v;
    EXPECT_NEAR(Aggregate(scda::Run(c), 20, AggregateKind::kSum), direct,
                1e-9 * InfNorm(x0) * 20);
  }
}

TEST(TransformAggregateTest, Examples) {
  RunConfig c = Config(Generate(GraphKind::kComplete, 3, {}, 0), {}, NoiseScheme::kZero);
  c.max_iterations = 30;
  const std::vector<double> ones{1.0, 1.0, 1.0};
  EXPECT_NEAR(TransformAggregate(ones, TransformKind::kProduct, c), 1.0, 1e-12);
  EXPECT_NEAR(TransformAggregate(ones, TransformKind::kVariance, c), 0.0, 1e-12);
  const std::vector<double> x{1.0, 2.0, 4.0};
  EXPECT_NEAR(TransformAggregate(x, TransformKind::kProduct, c), 1.0 * 2.0 * 4.0, 1e-9);
  EXPECT_NEAR(TransformAggregate(x, TransformKind::kSecondMoment, c), 7.0, 1e-12);

  RunConfig two = Config(Generate(GraphKind::kComplete, 2, {}, 0), {},
                         NoiseScheme::kZero);
  two.max_iterations = 5;
  EXPECT_NEAR(TransformAggregate(std::vector<double>{0.0, 2.0}, TransformKind::kVariance,
                                 two),
              1.0, 1e-12);
}

TEST(TransformAggregateTest, ProductRefusesNonPositiveInput) {
  RunConfig c = Config(Generate(GraphKind::kComplete, 2, {}, 0), {}, NoiseScheme::kZero);
  EXPECT_THROW(TransformAggregate(std::vector<double>{0.0, 2.0}, TransformKind::kProduct, c),
               ContractViolation);
  EXPECT_THROW(TransformAggregate(std::vector<double>{-1.0, 2.0}, TransformKind::kProduct, c),
               ContractViolation);
}

TEST(BoundMTest, Examples) {
  NoiseParams p;
  p.alpha = 1.0;
  p.rho = 0.5;
  EXPECT_DOUBLE_EQ(BoundM(std::vector<double>{1.0, -3.0}, p), 5.0);
  p.alpha = 1e-300;
  EXPECT_DOUBLE_EQ(BoundM(std::vector<double>{1.0, -3.0}, p), 3.0);
  p.alpha = 1.0;
  p.rho = 0.9;
  EXPECT_NEAR(BoundM(std::vector<double>{0.0}, p), 10.0, 1e-12);
}

TEST(DecayEnvelopeTest, ZeroNoiseReducesToContraction) {
  RunConfig c = Config(Generate(GraphKind::kPath, 3, {}, 0), {1.0, 2.0, 3.0},
                       NoiseScheme::kZero);
  c.max_iterations = 60;
  const RunTrace t = scda::Run(c);
  const double eps = ContractionFactor(Metropolis(c.graph));
  NoiseParams zero;
  zero.alpha = 0.0;
  zero.rho = 0.5;
  const auto points = DecayEnvelope(t, eps, zero);
  ASSERT_FALSE(points.empty());
  for (const EnvelopePoint& p : points) {
    EXPECT_DOUBLE_EQ(p.bound, std::pow(1.0 - eps, p.blocks) * t.rows[p.offset].spread);
    EXPECT_FALSE(p.violated) << "k=" << p.k;
  }
}

TEST(DecayEnvelopeTest, BoundVanishesForManyBlocks) {
  NoiseParams p;
  p.alpha = 1.0;
  p.rho = 0.9;
  EXPECT_LT(SpreadBound(10.0, 0, 5000, 5, 0.2, p), 1e-100);
  EXPECT_GT(SpreadBound(10.0, 0, 1, 5, 0.2, p), 8.0);
}

TEST(DecayEnvelopeTest, NoViolationsOnRingOfFive) {
  const Graph g = Generate(GraphKind::kRing, 5, {}, 0);
  const double eps = ContractionFactor(Metropolis(g));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RunConfig c = Config(g, RandomX0(5, seed), NoiseScheme::kScda, 1.0, 0.9, seed);
    c.max_iterations = 250;
    for (const EnvelopePoint& p : DecayEnvelope(scda::Run(c), eps, c.noise.params)) {
      EXPECT_FALSE(p.violated) << "seed " << seed << " k=" << p.k;
    }
  }
}

TEST(DecayEnvelopeTest, PreconditionsAreEnforced) {
  RunConfig c = Config(Generate(GraphKind::kComplete, 4, {}, 0), RandomX0(4, 1),
                       NoiseScheme::kZero);
  c.events = {{3, EventKind::kRemoveEdge, 0, 1}};
  const RunTrace t = scda::Run(c);
  EXPECT_THROW(DecayEnvelope(t, 0.1, c.noise.params), ContractViolation);
  c.events.clear();
  c.noise.params.h = 2;
  EXPECT_THROW(DecayEnvelope(scda::Run(c), 0.1, c.noise.params), ContractViolation);
}

TEST(CsvTest, TraceAndSummaryLayout) {
  RunConfig c = Config(Generate(GraphKind::kPath, 3, {}, 0), {1.0, 2.0, 3.0},
                       NoiseScheme::kScda, 1.0, 0.9, 42);
  c.max_iterations = 4;
  const RunTrace t = scda::Run(c);
  std::ostringstream trace, summary;
  WriteTraceCsv(trace, t);
  WriteSummaryCsv(summary, t);
  const std::string a = trace.str(), b = summary.str();
  EXPECT_EQ(a.rfind("k,node_id,x,x_plus,theta\n0,0,1,", 0), 0u);
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 5 * 3);
  EXPECT_EQ(b.rfind("k,V,err\n0,2,1\n", 0), 0u);
  EXPECT_EQ(std::count(b.begin(), b.end(), '\n'), 1 + 5);
}

}  // namespace
}  // namespace scda
