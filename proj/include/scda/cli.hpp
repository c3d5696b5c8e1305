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

#ifndef SCDA_CLI_HPP_
#define SCDA_CLI_HPP_

#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scda/config.hpp"
#include "scda/experiment.hpp"
#include "scda/privacy.hpp"

namespace scda {

// Command-line front end. Exit codes: 0 success, 1 runtime or config
// failure, 2 usage error.
//
//   scda run <config> [--out DIR]
//   scda sweep <config> --param rho --values 0.5,0.9 [--out DIR]
//   scda privacy <config> --epsilons 0.01,0.1 [--trials N] [--out DIR]
//   scda attack <config> --kind naive|later|disclosure [--out DIR]
//   scda validate <config>
inline int RunCli(int argc, const char* const* argv, std::ostream& out,
                  std::ostream& err) {
  CLI::App app{"Privacy-preserving average-consensus aggregation simulator", "scda"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto add_common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("config", config_path, "experiment config (key/value or JSON)")
        ->required();
    if (with_out) sub->add_option("--out", out_dir, "output directory override");
  };

  CLI::App* run = app.add_subcommand("run", "run all repetitions of an experiment");
  add_common(run, true);

  CLI::App* sweep = app.add_subcommand("sweep", "sweep one parameter over values");
  add_common(sweep, true);
  std::string sweep_param;
  std::vector<double> sweep_values;
  sweep->add_option("--param", sweep_param, "parameter name (rho, alpha, h, n, ...)")
      ->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")
      ->required()
      ->delimiter(',');

  CLI::App* privacy = app.add_subcommand("privacy", "sigma versus epsilon table");
  add_common(privacy, true);
  std::vector<double> epsilons;
  int trials = 0;
  privacy->add_option("--epsilons", epsilons, "comma-separated epsilons")->delimiter(',');
  privacy->add_option("--trials", trials, "Monte-Carlo trials per epsilon");

  CLI::App* attack = app.add_subcommand("attack", "run one adversary");
  add_common(attack, true);
  std::string attack_kind;
  attack->add_option("--kind", attack_kind, "naive, later or disclosure")
      ->required()
      ->check(CLI::IsMember({"naive", "later", "disclosure"}));

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a config");
  add_common(validate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    const ExperimentConfig config = LoadConfig(config_path);
    const std::filesystem::path directory =
        out_dir.empty() ? std::filesystem::path(config.outputs.directory)
                        : std::filesystem::path(out_dir);

    if (*validate) {
      // Building the graph catches generator failures that run would hit.
      BuildGraph(config);
      out << "ok: " << config_path << "\n";
      return 0;
    }

    if (*run) {
      const ExperimentResult result = RunExperiment(config, directory);
      for (const RunSummary& s : result.runs) {
        out << "run " << s.index << ": k_stop=" << s.trace.k_stop
            << " consensus=" << FormatDouble(s.trace.consensus_value)
            << " err=" << FormatDouble(s.trace.rows.back().err) << "\n";
      }
      out << "wrote " << (directory / "manifest.json").string() << "\n";
      return 0;
    }

    if (*sweep) {
      const auto rows = RunSweep(config, sweep_param, sweep_values);
      std::filesystem::create_directories(directory);
      const auto path = directory / "sweep.csv";
      internal::WriteFile(path, internal::Render([&](std::ostream& o) {
                            WriteSweepCsv(o, sweep_param, rows);
                          }));
      out << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
      return 0;
    }

    const AttackSetup setup = BuildAttackSetup(config);
    if (NoiselessInitialRound(setup.noise.params) ||
        setup.noise.scheme == NoiseScheme::kZero) {
      err << "warning: no initial noise; sigma is 1 for every epsilon\n";
    }
    std::filesystem::create_directories(directory);

    if (*privacy) {
      const std::vector<double>& eps = epsilons.empty() ? config.privacy.epsilons : epsilons;
      const auto reports =
          PrivacySweep(setup, eps, trials > 0 ? trials : config.privacy.trials);
      const auto path = directory / "privacy.csv";
      internal::WriteFile(path, internal::Render([&](std::ostream& o) {
                            WritePrivacyCsv(o, reports);
                          }));
      out << "wrote " << path.string() << " (" << reports.size() << " rows)\n";
      return 0;
    }

    if (*attack) {
      if (attack_kind == "disclosure") {
        if (!config.run.events.empty()) {
          throw ConfigError("run.events: the disclosure attack needs a static topology");
        }
        RunConfig rc = BuildRunConfig(config, setup.graph, 0);
        rc.record_trace = true;
        rc.max_iterations = std::max(config.privacy.horizon, 1);
        rc.term_epsilon = 0.0;
        const RunTrace trace = Run(rc);
        const AdversaryView view =
            MakeView(setup.graph, trace, setup.observer, setup.target, true);
        const DisclosureResult d = DisclosureAttack(view, config.privacy.horizon);
        const double truth = trace.x0[setup.target];
        const double bound = setup.noise.scheme == NoiseScheme::kZero
                                 ? 0.0
                                 : DisclosureErrorBound(setup.noise.params,
                                                        config.privacy.horizon);
        const auto path = directory / "attack_disclosure.csv";
        internal::WriteFile(path, internal::Render([&](std::ostream& o) {
                              o << "horizon,estimate,true_value,error,bound\n";
                              WriteCsvRow(o, {std::to_string(config.privacy.horizon),
                                              FormatDouble(d.estimate), FormatDouble(truth),
                                              FormatDouble(std::abs(d.estimate - truth)),
                                              FormatDouble(bound)});
                            }));
        out << "wrote " << path.string() << "\n";
        return 0;
      }
      std::vector<PrivacyReport> reports;
      for (double eps : config.privacy.epsilons) {
        const AttackResult r =
            attack_kind == "naive"
                ? NaiveAttack(setup, config.privacy.trials, eps)
                : LaterRoundAttack(setup, config.privacy.round, config.privacy.trials, eps);
        reports.push_back({eps, SigmaAnalytic({eps, setup.noise.params}), r.rate,
                           r.trials, r.std_error, attack_kind});
      }
      const auto path = directory / ("attack_" + attack_kind + ".csv");
      internal::WriteFile(path, internal::Render([&](std::ostream& o) {
                            WritePrivacyCsv(o, reports);
                          }));
      out << "wrote " << path.string() << " (" << reports.size() << " rows)\n";
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace scda

#endif  // SCDA_CLI_HPP_
