// Command-line front end: trim, design, run, compare.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "motobs/cli/commands.hpp"
#include "motobs/error.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Four-body motorcycle model with an LQR-designed Luenberger observer"};
  app.require_subcommand(1);

  std::string params;
  double speed_kph = 0.0;
  std::string out;
  double qw = 1.0;
  double rw = 1.0;
  bool strict = false;
  std::string scenario;
  std::string reference;
  std::string estimate;

  auto* trim = app.add_subcommand("trim", "Find the upright rectilinear trim at one speed");
  trim->add_option("--params", params, "Parameter file (YAML)")->required();
  trim->add_option("--speed-kph", speed_kph, "Forward speed in km/h")->required();
  trim->add_option("--out", out, "Write the trim as CSV to this file");

  auto* design = app.add_subcommand("design", "Linearize at a trim and design the observer");
  design->add_option("--params", params, "Parameter file (YAML)")->required();
  design->add_option("--speed-kph", speed_kph, "Trim speed in km/h")->required();
  design->add_option("--qw", qw, "Process weight Q_w = qw * I")->capture_default_str();
  design->add_option("--rw", rw, "Measurement weight R_w = rw * I")->capture_default_str();
  design->add_flag("--strict", strict,
                   "Reject any unobservable mode that is not strictly stable, including "
                   "the heading angle");
  design->add_option("--out", out, "Output directory for the matrix bundle")->required();

  auto* run = app.add_subcommand("run", "Co-simulate plant and observer for a scenario");
  run->add_option("--scenario", scenario, "Scenario file (YAML)")->required();
  run->add_option("--out", out, "Output directory")->required();
  run->add_flag("--strict", strict, "Strict detectability check in the observer design");

  auto* compare = app.add_subcommand("compare", "Compare an estimate CSV with a reference CSV");
  compare->add_option("--ref", reference, "Reference CSV (must contain t)")->required();
  compare->add_option("--est", estimate, "Estimate CSV with the reference's columns")
      ->required();
  compare->add_option("--out", out, "Write the metrics CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const std::optional<fs::path> out_path =
        out.empty() ? std::nullopt : std::optional<fs::path>(out);
    if (trim->parsed()) {
      motobs::cmd_trim(params, speed_kph, out_path, std::cout);
    } else if (design->parsed()) {
      motobs::cmd_design(params, speed_kph, qw, rw, strict, out, std::cout);
    } else if (run->parsed()) {
      motobs::cmd_run(scenario, out, strict, std::cout);
    } else if (compare->parsed()) {
      motobs::cmd_compare(reference, estimate, out_path, std::cout, std::cerr);
    }
  } catch (const motobs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
