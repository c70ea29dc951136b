// Convergence and stability studies from the command line.
//
//   oldroyd_study --study spatial --example 1 --element p2p0 --levels 8,16,32
//   oldroyd_study --config smooth_p2p0.cfg --out smooth_p2p0.csv
//
// The config file holds key=value lines with the long flag names as keys;
// flags given on the command line win.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oldroyd/study.hpp"

namespace {

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    return parse_number(s.substr(0, slash)) / parse_number(s.substr(slash + 1));
  }
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

int parse_level(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer level: '" + s + "'");
  return v;
}

template <typename Table>
void emit(const Table& table, const std::string& out) {
  if (out.empty() || out == "-") {
    oldroyd::write_csv(table, std::cout);
  } else {
    oldroyd::write_csv(table, std::filesystem::path(out));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite element convergence studies for the Oldroyd model of order one"};
  app.set_config("--config", "", "key=value file; command-line flags override it");

  std::string study = "spatial";
  int example = 1;
  std::string element = "p2p0";
  std::string levels;
  std::string k_rule = "h2";
  std::string final_times = "1";
  oldroyd::StudyConfig config;
  bool quiet = false;

  app.add_option("--study", study, "spatial | temporal | longtime | stability")
      ->capture_default_str();
  app.add_option("--example", example, "manufactured solution, 1 or 2")->capture_default_str();
  app.add_option("--element", element, "p2p0 | mini")->capture_default_str();
  app.add_option("--levels", levels, "mesh subdivisions, e.g. 8,16,32");
  app.add_option("--k-rule", k_rule, "h2 | sqrt | list=k1,k2,... (fractions allowed)")
      ->capture_default_str();
  app.add_option("--T", final_times, "final time; a comma list for the longtime study")
      ->capture_default_str();
  app.add_option("--mu", config.mu)->capture_default_str();
  app.add_option("--gamma", config.gamma)->capture_default_str();
  app.add_option("--delta", config.delta)->capture_default_str();
  app.add_option("--out", config.out, "CSV path; stdout when omitted");
  app.add_option("--picard-tol", config.controls.picard_tol)->capture_default_str();
  app.add_option("--picard-max", config.controls.picard_max)->capture_default_str();
  app.add_flag("--quiet", quiet, "no summary on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    config.study = oldroyd::parse_study_kind(study);
    config.example = example;
    config.element = oldroyd::parse_element_pair(element);
    config.levels.clear();
    for (const auto& s : split(levels)) config.levels.push_back(parse_level(s));
    config.k_rule = oldroyd::TimeStepRule::parse(k_rule);
    config.final_times.clear();
    for (const auto& s : split(final_times)) config.final_times.push_back(parse_number(s));
    config.validate();

    switch (config.study) {
      case oldroyd::StudyKind::Spatial:
        emit(oldroyd::run_spatial_study(config), config.out);
        break;
      case oldroyd::StudyKind::Temporal:
        emit(oldroyd::run_temporal_study(config), config.out);
        break;
      case oldroyd::StudyKind::Longtime: {
        const auto result = oldroyd::run_longtime_study(config);
        emit(result.tables, config.out);
        if (!quiet) {
          std::cerr << "rates stable across T: " << (result.rates_stable ? "yes" : "no") << '\n';
        }
        break;
      }
      case oldroyd::StudyKind::Stability: {
        const auto table = oldroyd::run_stability_study(config);
        emit(table, config.out);
        for (const auto& c : table.cells) {
          if (!c.ok) {
            std::cerr << "warning: n=" << c.level << " k=" << c.time_step << ": " << c.status
                      << '\n';
          }
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "oldroyd_study: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
