#include "kleinkit/dsl.hpp"
#include "kleinkit/klein.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

void list_maps() {
  for (const auto& e : kleinkit::map_catalog()) {
    std::cout << e.name << "\t" << e.description << "\n";
  }
}

std::vector<double> parse_thetas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(kleinkit::dsl::parse_real(item));
  }
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"kleinkit: check ladder-operator identities and Klein transformations"};
  app.require_subcommand(0, 1);

  bool top_list = false;
  app.add_flag("--list-maps", top_list, "List the catalog of standard dressing maps");

  auto* check = app.add_subcommand("check", "Run an assertion script");
  std::string script;
  std::optional<std::size_t> dim;
  std::string theta;
  std::optional<double> tol;
  std::uint64_t seed = 0;
  bool json = false;
  bool list = false;
  check->add_option("script", script, "Script file (.kq)");
  check->add_option("--numeric-dim", dim, "Boson cutoff D for numeric checks")->check(CLI::Range(2, 4096));
  check->add_option("--theta", theta, "Comma-separated probe angles, e.g. pi,pi/3");
  check->add_option("--tol", tol, "Interior residual tolerance")->check(CLI::PositiveNumber);
  check->add_option("--seed", seed, "Accepted for compatibility; runs are deterministic");
  check->add_flag("--json", json, "Emit a JSON report on stdout");
  check->add_flag("--list-maps", list, "List the catalog of standard dressing maps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (top_list || list) {
    list_maps();
    if (script.empty()) {
      return 0;
    }
  }
  if (!check->parsed()) {
    std::cout << app.help();
    return 2;
  }
  if (script.empty()) {
    std::cerr << "kleinkit check: missing script\n";
    return 2;
  }

  kleinkit::dsl::RunOptions options;
  options.numeric_dim = dim;
  options.tol = tol;
  options.seed = seed;

  kleinkit::dsl::RunReport report;
  try {
    if (!theta.empty()) {
      options.theta = parse_thetas(theta);
    }
  } catch (const kleinkit::Error& e) {
    std::cerr << "kleinkit check: bad --theta: " << e.what() << "\n";
    return 2;
  }

  std::ifstream in(script);
  if (!in) {
    report.script = script;
    report.exit_code = 2;
    report.error = kleinkit::dsl::ErrorInfo{{0, 0}, "cannot open script"};
  } else {
    std::stringstream buf;
    buf << in.rdbuf();
    report = kleinkit::dsl::check(buf.str(), options, script);
  }

  if (json) {
    std::cout << kleinkit::dsl::to_json(report).dump(2) << "\n";
  } else {
    std::cout << kleinkit::dsl::to_text(report);
  }
  return report.exit_code;
}
