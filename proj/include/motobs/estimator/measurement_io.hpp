#pragma once

#include <filesystem>
#include <string>

#include "motobs/estimator/observer.hpp"

namespace motobs {

/// File column order is (ax, ay, dphi, dpsi); rows are stored internally in
/// C-row order (ax, ay, dpsi, dphi).
extern const char* const kMeasurementHeader;
extern const char* const kEstimateHeader;

std::string measurement_csv(const MeasurementTrace& m);
void write_measurement_csv(const MeasurementTrace& m, const std::filesystem::path& path);
MeasurementTrace read_measurement_csv(const std::filesystem::path& path);
MeasurementTrace parse_measurement_csv(const std::string& text,
                                       const std::string& source = "<memory>");

/// `t,psi,...,Fry` of absolute estimates.
std::string estimate_csv(const EstimateTrajectory& est);
void write_estimate_csv(const EstimateTrajectory& est, const std::filesystem::path& path);

/// Matrix as CSV, one row per line, no header.
std::string matrix_csv(const Eigen::MatrixXd& M);

/// Writes A.csv, B.csv, C.csv, D.csv, G.csv, P.csv, spectrum.csv, trim.csv and
/// manifest.yaml into `dir`. The bundle is assembled in a sibling temporary
/// directory and moved into place, so a failure leaves no partial output.
void write_design_bundle(const LinearObserverDesign& d, double speed_kph,
                         const std::filesystem::path& dir);

/// Trim as a two-row CSV (state names then values) plus the inputs.
std::string trim_csv(const TrimPoint& tp);

}  // namespace motobs
