// Copyright 2026 The spdc-design Authors
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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "spdc/runner.hpp"

namespace {

// Distinct exit codes per error family.
enum ExitCode : int {
  kOk = 0,
  kOtherError = 1,
  kConfigError = 2,
  kRangeError = 3,
  kDomainError = 4,
  kBracketError = 5,
  kDiscretizationError = 6,
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design calculations for a parallel-crystal type-I SPDC entangled photon source"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string materials_path;
  std::string out_dir = "out";
  long seed = 0;
  app.add_option("--config", config_path, "Source configuration file (defaults when omitted)");
  app.add_option("--materials", materials_path, "Material dispersion data file (built-in data when omitted)");
  app.add_option("--out", out_dir, "Directory for CSV artifacts and reports");
  app.add_option("--seed", seed, "Reserved; all computations are deterministic");

  const std::pair<const char*, const char*> commands[] = {
      {"index", "Refractive indices, phase-matching angle and walk-off"},
      {"compensate", "Optimal compensator lengths and the linear length law"},
      {"phasemap", "Angle-resolved phase difference and flat-phase region"},
      {"sweep", "Single-polarizer sweep for the configured acceptance"},
      {"quality", "Coherence, visibility and fidelity for the configured acceptance"},
      {"brightness", "Relative brightness versus elliptical pump orientation"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  spdc::Subcommand sub = spdc::Subcommand::index;
  for (auto s : {spdc::Subcommand::index, spdc::Subcommand::compensate, spdc::Subcommand::phasemap,
                 spdc::Subcommand::sweep, spdc::Subcommand::quality, spdc::Subcommand::brightness}) {
    if (spdc::to_string(s) == name) sub = s;
  }

  try {
    std::optional<spdc::MaterialCatalog> loaded;
    if (!materials_path.empty()) loaded = spdc::MaterialCatalog::load(materials_path);
    const auto& catalog = loaded ? *loaded : spdc::default_catalog();
    const auto cfg = config_path.empty() ? spdc::parse_config_text("", "<defaults>", catalog)
                                         : spdc::parse_config(config_path, catalog);
    const auto report = spdc::run(sub, cfg, out_dir, catalog);
    std::cout << report.text;
    for (const auto& p : report.artifacts) std::cout << "wrote " << p.string() << "\n";
    return kOk;
  } catch (const spdc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const spdc::RangeError& e) {
    std::cerr << "range error: " << e.what() << "\n";
    return kRangeError;
  } catch (const spdc::BracketError& e) {
    std::cerr << "bracket error: " << e.what() << "\n";
    return kBracketError;
  } catch (const spdc::DiscretizationError& e) {
    std::cerr << "discretization error: " << e.what() << "\n";
    return kDiscretizationError;
  } catch (const spdc::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOtherError;
  }
}
