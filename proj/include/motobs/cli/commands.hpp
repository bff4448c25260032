#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "motobs/cli/scenario.hpp"
#include "motobs/estimator/observer.hpp"
#include "motobs/estimator/trim.hpp"
#include "motobs/io/csv.hpp"
#include "motobs/simulator/simulator.hpp"

namespace motobs {

/// Extended-state names in storage order, as used in CSV headers.
extern const char* const kStateNames[14];

/// Fraction of the run, at its end, over which static errors are averaged.
inline constexpr double kStaticWindowFraction = 0.2;

/// Index of the first sample of the final window of a time grid.
std::size_t final_window_begin(const std::vector<double>& t,
                               double fraction = kStaticWindowFraction);

struct StateMetric {
  std::string name;
  double reference = 0.0;      // mean plant value over the window
  double estimate = 0.0;       // mean estimate over the window
  double static_error = 0.0;   // estimate - reference, window mean
  double percent_error = 0.0;  // 100 |static_error| / |reference|, NaN if reference ~ 0
  double rms_error = 0.0;      // over the whole run
};

std::vector<StateMetric> static_error_metrics(const Trajectory& plant,
                                              const EstimateTrajectory& est);
std::string metrics_csv(const std::vector<StateMetric>& metrics);

struct RunResult {
  Scenario scenario;
  ParameterSet nominal;
  ParameterSet plant_params;
  TrimPoint plant_trim;
  LinearObserverDesign design;
  Trajectory plant;
  MeasurementTrace measurements;
  EstimateTrajectory estimate;
  std::vector<StateMetric> metrics;

  const StateMetric& metric(const std::string& name) const;
};

/// Observer design options used by the command-line tools: the heading angle
/// is never measured, so marginal unobservable modes are accepted unless
/// `strict` is set.
GainOptions cli_gain_options(bool strict);

/// Trims the plant and the observer, simulates, synthesizes measurements and
/// runs the observer. A plant or observer failure is reported in the result
/// (trajectory `failure` fields), not thrown.
RunResult run_scenario(const Scenario& sc, bool strict_design = false);

/// plant.csv, measurements.csv, estimate.csv, metrics.csv.
void write_run_outputs(const RunResult& r, const std::filesystem::path& dir);

TrimPoint cmd_trim(const std::filesystem::path& params, double speed_kph,
                   const std::optional<std::filesystem::path>& out, std::ostream& report);

LinearObserverDesign cmd_design(const std::filesystem::path& params, double speed_kph,
                                double qw_scale, double rw_scale, bool strict,
                                const std::filesystem::path& out, std::ostream& report);

/// Runs a scenario and writes its outputs. Throws NumericError (after writing
/// the partial outputs) when the plant or observer failed mid-run.
RunResult cmd_run(const std::filesystem::path& scenario, const std::filesystem::path& out,
                  bool strict_design, std::ostream& report);

struct ChannelMetric {
  std::string name;
  double rms = 0.0;
  double static_error = 0.0;
  double percent_static_error = 0.0;
};

struct Comparison {
  std::vector<ChannelMetric> channels;
  bool resampled = false;
};

/// Compares every non-time column of `reference` with the same column of
/// `estimate`. Estimate samples are zero-order-held onto the reference grid
/// when the grids differ.
Comparison compare_tables(const CsvTable& reference, const CsvTable& estimate);
std::string comparison_csv(const Comparison& c);

Comparison cmd_compare(const std::filesystem::path& reference,
                       const std::filesystem::path& estimate,
                       const std::optional<std::filesystem::path>& out, std::ostream& report,
                       std::ostream& warn);

}  // namespace motobs
