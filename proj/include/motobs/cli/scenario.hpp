#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "motobs/core/params.hpp"
#include "motobs/core/state.hpp"
#include "motobs/estimator/observer.hpp"
#include "motobs/simulator/simulator.hpp"

namespace motobs {

enum class InputKind { kTrim, kConstant, kCsv, kDoublet };

/// Smooth one-period steering-torque doublet on top of the trim drive torque:
/// tau(t) = amplitude * sin(2 pi s) * (1 - cos(2 pi s)) / 2, s = (t - start) / period.
struct DoubletSpec {
  double amplitude = 2.0;  // N m
  double start = 1.0;      // s
  double period = 2.0;     // s
};

struct InputSpec {
  InputKind kind = InputKind::kTrim;
  InputVector constant = InputVector::Zero();
  std::filesystem::path csv;  // columns t,tau,tau_D,tau_Bf,tau_Br
  DoubletSpec doublet;
};

enum class InitialRule { kTrim, kNoSlip, kExplicit };

struct PlantSpec {
  double speed_kph = 0.0;  // trim speed of the plant
  double rider_mass_scale = 1.0;
  InitialRule initial = InitialRule::kTrim;
  double vx_offset = 0.0;  // added to the trim vx
  ExtendedState state = ExtendedState::Zero();  // for kExplicit
};

struct ObserverSpec {
  double design_speed_kph = 0.0;
  Matrix14 Q_w = Matrix14::Identity();
  Matrix4 R_w = Matrix4::Identity();
  InitialRule initial = InitialRule::kNoSlip;
  ExtendedState state = ExtendedState::Zero();  // absolute, for kExplicit
};

struct Scenario {
  std::string name;
  std::filesystem::path params;
  double speed_kph = 0.0;
  double duration = 0.0;
  double dt = 0.001;
  InputSpec inputs;
  PlantSpec plant;
  ObserverSpec observer;
  std::optional<MeasurementNoise> noise;
};

/// Parses a scenario document. Relative paths resolve against `base_dir`.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

/// Builds the sampled input trace for a scenario over [0, duration].
InputTrace build_inputs(const Scenario& sc, const InputVector& u_trim, double dt);

/// Input trace from a CSV file with columns t,tau,tau_D,tau_Bf,tau_Br.
InputTrace read_input_csv(const std::filesystem::path& path);

/// Value of the doublet steering torque at time t.
double doublet_torque(const DoubletSpec& d, double t);

}  // namespace motobs
