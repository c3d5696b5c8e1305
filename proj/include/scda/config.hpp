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

#ifndef SCDA_CONFIG_HPP_
#define SCDA_CONFIG_HPP_

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scda/csv.hpp"
#include "scda/engine.hpp"
#include "scda/error.hpp"
#include "scda/noise.hpp"
#include "scda/topology.hpp"

namespace scda {

// Experiment configuration.
//
// Two surface syntaxes map onto the same sectioned key/value table:
//
//   [topology]                     {"topology": {"kind": "ring", "n": 5},
//   kind = ring                     "x0": {"values": [1, 2, 3, 4, 5]},
//   n = 5                           ...}
//   [x0]
//   values = 1, 2, 3, 4, 5
//
// Lines starting with '#' or ';' are comments. Duplicate sections, duplicate
// keys and unknown keys are errors. A manifest written by RunExperiment is
// itself a valid JSON config: only its "config_resolved" member is read.

struct TopologySpec {
  GraphKind kind = GraphKind::kComplete;
  int n = 1;
  GeneratorParams params;
  std::optional<std::uint64_t> seed;  // required for random kinds

  friend bool operator==(const TopologySpec& a, const TopologySpec& b) {
    return a.kind == b.kind && a.n == b.n && a.params.p == b.params.p &&
           a.params.radius == b.params.radius && a.seed == b.seed;
  }
};

// Either explicit values or a uniform range with its own seed.
struct X0Spec {
  std::vector<double> values;
  double low = 0.0;
  double high = 1.0;
  std::optional<std::uint64_t> seed;

  bool explicit_values() const { return !values.empty(); }
  friend bool operator==(const X0Spec&, const X0Spec&) = default;
};

struct NoiseSpec {
  NoiseScheme scheme = NoiseScheme::kScda;
  double alpha = 1.0;
  double rho = 0.9;
  int h = 1;
  NoiseDistribution distribution = NoiseDistribution::kUniform;
  std::optional<std::uint64_t> seed;  // required unless scheme is zero
  double variance = 1.0;

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

struct RunSpec {
  int max_iterations = 0;  // 0 selects n^2
  double term_epsilon = 0.0;
  std::vector<TopologyEvent> events;

  friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

struct OutputSpec {
  std::string directory = "scda_out";
  bool trace = true;
  bool summary = true;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct PrivacySpec {
  std::vector<double> epsilons{0.01, 0.05, 0.1};
  int trials = 10000;
  NodeId observer = 0;
  NodeId target = 1;
  int round = 1;
  int horizon = 100;
  double prior_half_width = 100.0;
  std::optional<std::uint64_t> seed;  // required by privacy/attack commands

  friend bool operator==(const PrivacySpec&, const PrivacySpec&) = default;
};

struct ExperimentConfig {
  TopologySpec topology;
  X0Spec x0;
  NoiseSpec noise;
  RunSpec run;
  OutputSpec outputs;
  PrivacySpec privacy;
  int repetitions = 1;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// section -> key -> raw text value
using RawConfig = std::map<std::string, std::map<std::string, std::string>>;

namespace internal {

inline std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> Split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    parts.push_back(Trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline std::string JsonScalarToText(const nlohmann::json& v, const std::string& field) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return FormatDouble(v.get<double>());
  throw ConfigError(field + ": unsupported JSON value");
}

}  // namespace internal

inline RawConfig ParseKeyValueText(std::string_view text) {
  RawConfig raw;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = internal::Trim(line);
    if (trimmed.empty() || trimmed[0] == '#' || trimmed[0] == ';') continue;
    const std::string where = "line " + std::to_string(line_no);
    if (trimmed.front() == '[') {
      if (trimmed.back() != ']') throw ConfigError(where + ": malformed section header");
      section = internal::Trim(std::string_view(trimmed).substr(1, trimmed.size() - 2));
      if (raw.contains(section)) {
        throw ConfigError(where + ": duplicated section [" + section + "]");
      }
      raw[section];
      continue;
    }
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    if (section.empty()) throw ConfigError(where + ": key outside of a section");
    const std::string key = internal::Trim(std::string_view(trimmed).substr(0, eq));
    std::string value = internal::Trim(std::string_view(trimmed).substr(eq + 1));
    if (const auto hash = value.find(" #"); hash != std::string::npos) {
      value = internal::Trim(std::string_view(value).substr(0, hash));
    }
    if (!raw[section].emplace(key, value).second) {
      throw ConfigError(where + ": duplicated key " + section + "." + key);
    }
  }
  return raw;
}

inline RawConfig ParseJsonText(std::string_view text) {
  // Track keys per open object so that duplicates are rejected; the JSON
  // library itself keeps the last occurrence silently.
  std::vector<std::set<std::string>> open_objects;
  auto on_event = [&](int, nlohmann::json::parse_event_t event,
                      nlohmann::json& parsed) {
    using Event = nlohmann::json::parse_event_t;
    if (event == Event::object_start) {
      open_objects.emplace_back();
    } else if (event == Event::object_end) {
      open_objects.pop_back();
    } else if (event == Event::key) {
      const std::string key = parsed.get<std::string>();
      if (!open_objects.back().insert(key).second) {
        throw ConfigError("duplicated key '" + key + "'");
      }
    }
    return true;
  };
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end(), on_event);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("config_resolved")) doc = doc["config_resolved"];
  if (!doc.is_object()) throw ConfigError("JSON config must be an object");
  RawConfig raw;
  for (const auto& [section, body] : doc.items()) {
    if (!body.is_object()) throw ConfigError(section + ": expected an object");
    auto& out = raw[section];
    for (const auto& [key, value] : body.items()) {
      const std::string field = section + "." + key;
      if (value.is_array()) {
        std::string joined;
        for (const auto& item : value) {
          if (!joined.empty()) joined += ", ";
          joined += internal::JsonScalarToText(item, field);
        }
        out[key] = joined;
      } else {
        out[key] = internal::JsonScalarToText(value, field);
      }
    }
  }
  return raw;
}

namespace internal {

// Reads typed fields out of one section and remembers which keys were used.
class SectionReader {
 public:
  SectionReader(const RawConfig& raw, std::string section)
      : section_(std::move(section)) {
    if (auto it = raw.find(section_); it != raw.end()) values_ = &it->second;
  }

  bool Has(const std::string& key) const {
    return values_ && values_->contains(key);
  }

  std::string Text(const std::string& key) {
    used_.insert(key);
    return values_->at(key);
  }

  std::string Field(const std::string& key) const { return section_ + "." + key; }

  void Require(const std::string& key) const {
    if (!Has(key)) throw ConfigError(Field(key) + ": missing required field");
  }

  double Double(const std::string& key, double fallback) {
    return Has(key) ? ParseDouble(Text(key), Field(key)) : fallback;
  }

  long long Integer(const std::string& key, long long fallback) {
    if (!Has(key)) return fallback;
    const std::string text = Text(key);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ConfigError(Field(key) + ": expected an integer, got '" + text + "'");
    }
    return value;
  }

  std::optional<std::uint64_t> Seed(const std::string& key) {
    if (!Has(key)) return std::nullopt;
    const std::string text = Text(key);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ConfigError(Field(key) + ": expected a non-negative integer seed");
    }
    return value;
  }

  bool Bool(const std::string& key, bool fallback) {
    if (!Has(key)) return fallback;
    const std::string text = Text(key);
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError(Field(key) + ": expected true or false");
  }

  std::vector<double> Doubles(const std::string& key) {
    std::vector<double> out;
    if (!Has(key)) return out;
    const std::string text = Text(key);
    if (Trim(text).empty()) return out;
    for (const std::string& part : Split(text, ',')) {
      out.push_back(ParseDouble(part, Field(key)));
    }
    return out;
  }

  void RejectUnknown() const {
    if (!values_) return;
    for (const auto& [key, value] : *values_) {
      if (!used_.contains(key)) throw ConfigError(Field(key) + ": unknown key");
    }
  }

 private:
  std::string section_;
  const std::map<std::string, std::string>* values_ = nullptr;
  std::set<std::string> used_;
};

inline std::vector<TopologyEvent> ParseEvents(const std::string& text,
                                              const std::string& field) {
  std::vector<TopologyEvent> events;
  if (Trim(text).empty()) return events;
  for (const std::string& item : Split(text, ';')) {
    if (item.empty()) continue;
    std::istringstream in(item);
    TopologyEvent e;
    std::string kind;
    if (!(in >> e.at_iteration >> kind >> e.u)) {
      throw ConfigError(field + ": expected '<k> <kind> <u> [v]', got '" + item + "'");
    }
    if (kind == "remove_node") {
      e.kind = EventKind::kRemoveNode;
    } else {
      if (kind == "remove_edge") {
        e.kind = EventKind::kRemoveEdge;
      } else if (kind == "add_edge") {
        e.kind = EventKind::kAddEdge;
      } else {
        throw ConfigError(field + ": unknown event kind '" + kind + "'");
      }
      if (!(in >> e.v)) throw ConfigError(field + ": edge event needs two nodes");
    }
    std::string rest;
    if (in >> rest) throw ConfigError(field + ": trailing text in '" + item + "'");
    if (e.at_iteration < 0) throw ConfigError(field + ": negative event iteration");
    events.push_back(e);
  }
  return events;
}

inline std::string FormatEvents(const std::vector<TopologyEvent>& events) {
  std::string out;
  for (const TopologyEvent& e : events) {
    if (!out.empty()) out += "; ";
    out += std::to_string(e.at_iteration) + " " + std::string(ToString(e.kind)) +
           " " + std::to_string(e.u);
    if (e.kind != EventKind::kRemoveNode) out += " " + std::to_string(e.v);
  }
  return out;
}

}  // namespace internal

inline ExperimentConfig ConfigFromRaw(const RawConfig& raw) {
  static const std::set<std::string> kSections{"topology", "x0",      "noise",
                                               "run",      "outputs", "privacy",
                                               "experiment"};
  for (const auto& [section, body] : raw) {
    if (!kSections.contains(section)) {
      throw ConfigError("[" + section + "]: unknown section");
    }
  }
  ExperimentConfig c;

  internal::SectionReader topology(raw, "topology");
  topology.Require("kind");
  topology.Require("n");
  c.topology.kind = ParseGraphKind(topology.Text("kind"));
  const long long n = topology.Integer("n", 0);
  if (n < 1 || n > 100000) throw ConfigError("topology.n must be >= 1");
  c.topology.n = static_cast<int>(n);
  c.topology.params.p = topology.Double("p", c.topology.params.p);
  c.topology.params.radius = topology.Double("radius", c.topology.params.radius);
  c.topology.seed = topology.Seed("seed");
  if (!(c.topology.params.p >= 0.0 && c.topology.params.p <= 1.0)) {
    throw ConfigError("topology.p must be in [0,1]");
  }
  if (!(c.topology.params.radius >= 0.0)) {
    throw ConfigError("topology.radius must be >= 0");
  }
  const bool random_kind = c.topology.kind == GraphKind::kRandomGnp ||
                           c.topology.kind == GraphKind::kRandomGeometric;
  if (random_kind && !c.topology.seed) topology.Require("seed");
  topology.RejectUnknown();

  internal::SectionReader x0(raw, "x0");
  c.x0.values = x0.Doubles("values");
  c.x0.low = x0.Double("low", c.x0.low);
  c.x0.high = x0.Double("high", c.x0.high);
  c.x0.seed = x0.Seed("seed");
  if (c.x0.explicit_values()) {
    if (static_cast<int>(c.x0.values.size()) != c.topology.n) {
      throw ConfigError("x0.values: expected " + std::to_string(c.topology.n) +
                        " values, got " + std::to_string(c.x0.values.size()));
    }
  } else {
    x0.Require("seed");
    if (!(c.x0.low <= c.x0.high)) throw ConfigError("x0.low must be <= x0.high");
  }
  for (double v : c.x0.values) {
    if (!std::isfinite(v)) throw ConfigError("x0.values: non-finite value");
  }
  x0.RejectUnknown();

  internal::SectionReader noise(raw, "noise");
  noise.Require("scheme");
  c.noise.scheme = ParseNoiseScheme(noise.Text("scheme"));
  c.noise.alpha = noise.Double("alpha", c.noise.alpha);
  c.noise.rho = noise.Double("rho", c.noise.rho);
  const long long h = noise.Integer("h", c.noise.h);
  if (h < 1 || h > 1024) throw ConfigError("noise.h must be in [1,1024]");
  c.noise.h = static_cast<int>(h);
  if (noise.Has("distribution")) {
    c.noise.distribution = ParseNoiseDistribution(noise.Text("distribution"));
  }
  c.noise.seed = noise.Seed("seed");
  c.noise.variance = noise.Double("variance", c.noise.variance);
  if (!(c.noise.alpha > 0.0) || !std::isfinite(c.noise.alpha)) {
    throw ConfigError("noise.alpha must be > 0");
  }
  if (!(c.noise.rho >= 0.0 && c.noise.rho < 1.0)) {
    throw ConfigError("noise.rho must be in [0,1)");
  }
  if (!(c.noise.variance >= 0.0)) throw ConfigError("noise.variance must be >= 0");
  if (c.noise.scheme != NoiseScheme::kZero && !c.noise.seed) noise.Require("seed");
  noise.RejectUnknown();

  internal::SectionReader run(raw, "run");
  const long long max_iterations = run.Integer("max_iterations", 0);
  if (max_iterations < 0 || max_iterations > 100000000) {
    throw ConfigError("run.max_iterations must be >= 0 (0 selects n^2)");
  }
  c.run.max_iterations = static_cast<int>(max_iterations);
  c.run.term_epsilon = run.Double("term_epsilon", 0.0);
  if (!(c.run.term_epsilon >= 0.0)) throw ConfigError("run.term_epsilon must be >= 0");
  if (run.Has("events")) {
    c.run.events = internal::ParseEvents(run.Text("events"), run.Field("events"));
  }
  for (const TopologyEvent& e : c.run.events) {
    if (e.u < 0 || e.u >= c.topology.n || e.v < 0 || e.v >= c.topology.n) {
      throw ConfigError("run.events: node id out of range");
    }
  }
  run.RejectUnknown();

  internal::SectionReader outputs(raw, "outputs");
  if (outputs.Has("directory")) c.outputs.directory = outputs.Text("directory");
  c.outputs.trace = outputs.Bool("trace", c.outputs.trace);
  c.outputs.summary = outputs.Bool("summary", c.outputs.summary);
  outputs.RejectUnknown();

  internal::SectionReader privacy(raw, "privacy");
  if (privacy.Has("epsilons")) c.privacy.epsilons = privacy.Doubles("epsilons");
  for (double e : c.privacy.epsilons) {
    if (!(e > 0.0)) throw ConfigError("privacy.epsilons: every epsilon must be > 0");
  }
  c.privacy.trials = static_cast<int>(privacy.Integer("trials", c.privacy.trials));
  if (c.privacy.trials < 1) throw ConfigError("privacy.trials must be >= 1");
  c.privacy.observer = static_cast<NodeId>(privacy.Integer("observer", c.privacy.observer));
  c.privacy.target = static_cast<NodeId>(privacy.Integer("target", c.privacy.target));
  if (c.privacy.observer < 0 || c.privacy.observer >= c.topology.n ||
      c.privacy.target < 0 || c.privacy.target >= c.topology.n) {
    throw ConfigError("privacy.observer/target out of range");
  }
  c.privacy.round = static_cast<int>(privacy.Integer("round", c.privacy.round));
  c.privacy.horizon = static_cast<int>(privacy.Integer("horizon", c.privacy.horizon));
  if (c.privacy.round < 0) throw ConfigError("privacy.round must be >= 0");
  if (c.privacy.horizon < 0) throw ConfigError("privacy.horizon must be >= 0");
  c.privacy.prior_half_width =
      privacy.Double("prior_half_width", c.privacy.prior_half_width);
  if (!(c.privacy.prior_half_width > 0.0)) {
    throw ConfigError("privacy.prior_half_width must be > 0");
  }
  c.privacy.seed = privacy.Seed("seed");
  privacy.RejectUnknown();

  internal::SectionReader experiment(raw, "experiment");
  const long long reps = experiment.Integer("repetitions", 1);
  if (reps < 1 || reps > 1000000) throw ConfigError("experiment.repetitions must be >= 1");
  c.repetitions = static_cast<int>(reps);
  experiment.RejectUnknown();
  return c;
}

inline ExperimentConfig ParseConfig(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool json = first != std::string_view::npos && text[first] == '{';
  return ConfigFromRaw(json ? ParseJsonText(text) : ParseKeyValueText(text));
}

// Reads and validates a config file (key/value text or JSON).
inline ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path.string() + " (file not found)");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

// Fully resolved config as JSON, defaults included. Feeding it back through
// ParseConfig yields an equal ExperimentConfig.
inline nlohmann::json ConfigToJson(const ExperimentConfig& c) {
  using nlohmann::json;
  json j;
  json& t = j["topology"];
  t["kind"] = std::string(ToString(c.topology.kind));
  t["n"] = c.topology.n;
  t["p"] = c.topology.params.p;
  t["radius"] = c.topology.params.radius;
  if (c.topology.seed) t["seed"] = *c.topology.seed;
  json& x = j["x0"];
  if (c.x0.explicit_values()) x["values"] = c.x0.values;
  x["low"] = c.x0.low;
  x["high"] = c.x0.high;
  if (c.x0.seed) x["seed"] = *c.x0.seed;
  json& nz = j["noise"];
  nz["scheme"] = std::string(ToString(c.noise.scheme));
  nz["alpha"] = c.noise.alpha;
  nz["rho"] = c.noise.rho;
  nz["h"] = c.noise.h;
  nz["distribution"] = std::string(ToString(c.noise.distribution));
  if (c.noise.seed) nz["seed"] = *c.noise.seed;
  nz["variance"] = c.noise.variance;
  json& r = j["run"];
  r["max_iterations"] = c.run.max_iterations;
  r["term_epsilon"] = c.run.term_epsilon;
  r["events"] = internal::FormatEvents(c.run.events);
  json& o = j["outputs"];
  o["directory"] = c.outputs.directory;
  o["trace"] = c.outputs.trace;
  o["summary"] = c.outputs.summary;
  json& p = j["privacy"];
  p["epsilons"] = c.privacy.epsilons;
  p["trials"] = c.privacy.trials;
  p["observer"] = c.privacy.observer;
  p["target"] = c.privacy.target;
  p["round"] = c.privacy.round;
  p["horizon"] = c.privacy.horizon;
  p["prior_half_width"] = c.privacy.prior_half_width;
  if (c.privacy.seed) p["seed"] = *c.privacy.seed;
  j["experiment"]["repetitions"] = c.repetitions;
  return j;
}

}  // namespace scda

#endif  // SCDA_CONFIG_HPP_
