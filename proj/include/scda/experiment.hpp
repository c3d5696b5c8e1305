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

#ifndef SCDA_EXPERIMENT_HPP_
#define SCDA_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "scda/config.hpp"
#include "scda/engine.hpp"
#include "scda/privacy.hpp"
#include "scda/rng.hpp"
#include "scda/topology.hpp"

namespace scda {

inline constexpr const char* kVersion = "1.0.0";

// Seeds of repetition 0 are the configured seeds; later repetitions derive
// theirs from the configured seed and the repetition index.
inline std::uint64_t RepetitionSeed(std::uint64_t base, int repetition) {
  return repetition == 0 ? base
                         : DeriveSeed(base, {static_cast<std::uint64_t>(repetition)});
}

inline Graph BuildGraph(const ExperimentConfig& c) {
  return Generate(c.topology.kind, c.topology.n, c.topology.params,
                  c.topology.seed.value_or(0));
}

inline std::vector<double> BuildX0(const ExperimentConfig& c, int repetition) {
  if (c.x0.explicit_values()) return c.x0.values;
  Stream stream(RepetitionSeed(*c.x0.seed, repetition));
  std::vector<double> x0(c.topology.n);
  for (double& v : x0) v = stream.Uniform(c.x0.low, c.x0.high);
  return x0;
}

inline NoiseConfig BuildNoise(const ExperimentConfig& c, int repetition) {
  NoiseConfig noise;
  noise.scheme = c.noise.scheme;
  noise.params.alpha = c.noise.alpha;
  noise.params.rho = c.noise.rho;
  noise.params.h = c.noise.h;
  noise.params.distribution = c.noise.distribution;
  noise.params.seed = RepetitionSeed(c.noise.seed.value_or(0), repetition);
  noise.gaussian_variance = c.noise.variance;
  return noise;
}

inline RunConfig BuildRunConfig(const ExperimentConfig& c, const Graph& graph,
                                int repetition) {
  RunConfig run;
  run.graph = graph;
  run.x0 = BuildX0(c, repetition);
  run.noise = BuildNoise(c, repetition);
  run.max_iterations = c.run.max_iterations;
  run.term_epsilon = c.run.term_epsilon;
  run.events = c.run.events;
  run.record_trace = c.outputs.trace;
  return run;
}

inline AttackSetup BuildAttackSetup(const ExperimentConfig& c) {
  if (!c.privacy.seed) throw ConfigError("privacy.seed: missing required field");
  AttackSetup setup;
  setup.graph = BuildGraph(c);
  setup.noise = BuildNoise(c, 0);
  setup.observer = c.privacy.observer;
  setup.target = c.privacy.target;
  setup.prior_half_width = c.privacy.prior_half_width;
  setup.seed = *c.privacy.seed;
  return setup;
}

struct RunSummary {
  int index = 0;
  std::uint64_t x0_seed = 0;
  std::uint64_t noise_seed = 0;
  RunTrace trace;
};

namespace internal {

inline void WriteFile(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << body;
}

template <typename Writer>
std::string Render(Writer&& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

}  // namespace internal

struct ExperimentResult {
  std::vector<RunSummary> runs;
  nlohmann::json manifest;
  std::vector<std::filesystem::path> files;
};

// Runs every repetition, writes run_<r>_trace.csv / run_<r>_summary.csv as
// configured and a manifest.json that fully determines the outputs. Files are
// a pure function of the config.
inline ExperimentResult RunExperiment(const ExperimentConfig& config,
                                      const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  const Graph graph = BuildGraph(config);
  ExperimentResult result;
  nlohmann::json runs = nlohmann::json::array();
  nlohmann::json run_seeds = nlohmann::json::array();
  for (int r = 0; r < config.repetitions; ++r) {
    RunSummary summary;
    summary.index = r;
    summary.x0_seed = config.x0.seed ? RepetitionSeed(*config.x0.seed, r) : 0;
    summary.noise_seed = RepetitionSeed(config.noise.seed.value_or(0), r);
    try {
      summary.trace = Run(BuildRunConfig(config, graph, r));
    } catch (const Error& e) {
      throw EngineError("run " + std::to_string(r) + ": " + e.what());
    }
    const RunTrace& trace = summary.trace;
    const std::string stem = "run_" + std::to_string(r);
    if (config.outputs.trace) {
      result.files.push_back(directory / (stem + "_trace.csv"));
      internal::WriteFile(result.files.back(), internal::Render([&](std::ostream& o) {
                            WriteTraceCsv(o, trace);
                          }));
    }
    if (config.outputs.summary) {
      result.files.push_back(directory / (stem + "_summary.csv"));
      internal::WriteFile(result.files.back(), internal::Render([&](std::ostream& o) {
                            WriteSummaryCsv(o, trace);
                          }));
    }
    nlohmann::json events = nlohmann::json::array();
    for (const AppliedEvent& e : trace.events) {
      events.push_back({{"at_iteration", e.event.at_iteration},
                        {"kind", std::string(ToString(e.event.kind))},
                        {"accepted", e.accepted},
                        {"message", e.message},
                        {"true_average", e.reference_average}});
    }
    const int survivors = static_cast<int>(trace.x_final.size());
    runs.push_back({{"index", r},
                    {"x0_seed", summary.x0_seed},
                    {"noise_seed", summary.noise_seed},
                    {"k_stop", trace.k_stop},
                    {"reason", std::string(ToString(trace.reason))},
                    {"final_err", trace.rows.back().err},
                    {"final_V", trace.rows.back().spread},
                    {"consensus_value", trace.consensus_value},
                    {"true_average", trace.rows.back().reference_average},
                    {"sum", Aggregate(trace, survivors, AggregateKind::kSum)},
                    {"events", events}});
    run_seeds.push_back({{"index", r},
                         {"x0_seed", summary.x0_seed},
                         {"noise_seed", summary.noise_seed}});
    result.runs.push_back(std::move(summary));
  }
  nlohmann::json seeds;
  seeds["topology"] = config.topology.seed.value_or(0);
  seeds["x0"] = config.x0.seed.value_or(0);
  seeds["noise"] = config.noise.seed.value_or(0);
  seeds["privacy"] = config.privacy.seed.value_or(0);
  seeds["runs"] = run_seeds;
  result.manifest = {{"version", kVersion},
                     {"config_resolved", ConfigToJson(config)},
                     {"seeds", seeds},
                     {"runs", runs}};
  result.files.push_back(directory / "manifest.json");
  internal::WriteFile(result.files.back(), result.manifest.dump(2) + "\n");
  return result;
}

// ---------------------------------------------------------------------------
// Parameter sweeps

// Short sweep parameter name -> "section.key".
inline std::string ResolveSweepParam(const std::string& name) {
  static const std::map<std::string, std::string> kAliases{
      {"alpha", "noise.alpha"},       {"rho", "noise.rho"},
      {"h", "noise.h"},               {"variance", "noise.variance"},
      {"n", "topology.n"},            {"p", "topology.p"},
      {"radius", "topology.radius"},  {"max_iterations", "run.max_iterations"},
      {"term_epsilon", "run.term_epsilon"}};
  if (auto it = kAliases.find(name); it != kAliases.end()) return it->second;
  if (name.find('.') != std::string::npos) return name;
  throw ConfigError("sweep: unknown parameter '" + name + "'");
}

// Returns a copy of `base` with one field replaced, re-validated.
inline ExperimentConfig OverrideField(const ExperimentConfig& base,
                                      const std::string& param, double value) {
  const std::string path = ResolveSweepParam(param);
  const auto dot = path.find('.');
  nlohmann::json j = ConfigToJson(base);
  const std::string section = path.substr(0, dot);
  const std::string key = path.substr(dot + 1);
  if (!j.contains(section)) throw ConfigError("sweep: unknown section in '" + path + "'");
  auto& slot = j[section][key];
  if (key == "n" || key == "h" || key == "max_iterations") {
    if (value != std::floor(value)) throw ConfigError(path + ": expected an integer");
    slot = static_cast<long long>(value);
  } else {
    slot = value;
  }
  // A changed n invalidates explicit initial values.
  if (key == "n" && base.x0.explicit_values()) {
    throw ConfigError("sweep over n needs x0 given as a seeded range");
  }
  return ParseConfig(j.dump());
}

struct SweepRow {
  double value = 0.0;
  int repetition = 0;
  RunTrace trace;
};

inline std::vector<SweepRow> RunSweep(const ExperimentConfig& base,
                                      const std::string& param,
                                      const std::vector<double>& values) {
  std::vector<SweepRow> rows;
  for (double v : values) {
    ExperimentConfig c = OverrideField(base, param, v);
    c.outputs.trace = false;
    const Graph graph = BuildGraph(c);
    for (int r = 0; r < c.repetitions; ++r) {
      rows.push_back({v, r, Run(BuildRunConfig(c, graph, r))});
    }
  }
  return rows;
}

// Columns param,value,rep,k_stop,final_err,final_V,consensus_value.
inline void WriteSweepCsv(std::ostream& out, const std::string& param,
                          const std::vector<SweepRow>& rows) {
  out << "param,value,rep,k_stop,final_err,final_V,consensus_value\n";
  for (const SweepRow& row : rows) {
    WriteCsvRow(out, {param, FormatDouble(row.value), std::to_string(row.repetition),
                      std::to_string(row.trace.k_stop),
                      FormatDouble(row.trace.rows.back().err),
                      FormatDouble(row.trace.rows.back().spread),
                      FormatDouble(row.trace.consensus_value)});
  }
}

}  // namespace scda

#endif  // SCDA_EXPERIMENT_HPP_
