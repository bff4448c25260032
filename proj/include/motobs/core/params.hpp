#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "motobs/core/state.hpp"

namespace motobs {

/// Magic-formula coefficients for one slip channel. The peak factor is stored
/// as a friction coefficient; the force peak is `D * normal_load`.
struct MagicFormulaChannel {
  double B = 0.0;  // stiffness factor
  double C = 0.0;  // shape factor
  double D = 0.0;  // peak friction coefficient (peak force per newton of load)
  double E = 0.0;  // curvature factor

  bool operator==(const MagicFormulaChannel&) const = default;
};

struct TireCoefficients {
  MagicFormulaChannel longitudinal;  // driven by longitudinal slip kappa
  MagicFormulaChannel side_slip;     // driven by side-slip angle alpha
  MagicFormulaChannel camber;        // driven by camber angle gamma

  bool operator==(const TireCoefficients&) const = default;
};

enum class LateralRelaxationSpeed {
  kForward,  // |vx^V| / sigma_y, the usual relaxation-length form
  kLateral,  // vy^V / sigma_y, driven by the lateral velocity
};

struct ModelOptions {
  LateralRelaxationSpeed lateral_relaxation = LateralRelaxationSpeed::kForward;
  /// Insert the caster rotation into the front contact arm.
  bool front_arm_caster = false;

  bool operator==(const ModelOptions&) const = default;
};

/// Geometric, inertial, aerodynamic and tire constants of the four-body
/// model. Angles are radians, everything else SI.
struct ParameterSet {
  double l_f = 0.0, l_r = 0.0;
  /// Longitudinal offset of the whole-vehicle COM from V. When the file does
  /// not provide it, it is the mass-weighted mean of the four body COMs at the
  /// upright configuration.
  double l_m = 0.0;
  bool l_m_overridden = false;
  double h = 0.0;
  double R_f = 0.0, R_r = 0.0;
  double s = 0.0, e = 0.0, f = 0.0, a = 0.0, c = 0.0;
  double eps = 0.0;
  double m_Gr = 0.0, m_Gf = 0.0, m_Rf = 0.0, m_Rr = 0.0;
  Matrix3 J_Gr = Matrix3::Zero(), J_Gf = Matrix3::Zero();
  Matrix3 J_Rf = Matrix3::Zero(), J_Rr = Matrix3::Zero();
  double sigma_fx = 0.0, sigma_rx = 0.0, sigma_fy = 0.0, sigma_ry = 0.0;
  double C_d = 0.0, A_v = 0.0, rho_air = 0.0;
  double K_delta = 0.0;
  double g = 9.81;
  TireCoefficients tire_front, tire_rear;
  ModelOptions options;

  bool operator==(const ParameterSet&) const = default;
};

double total_mass(const ParameterSet& p);

/// Mass-weighted longitudinal COM position at q = 0, measured from V.
double derived_l_m(const ParameterSet& p);

/// Recomputes l_m unless it was explicitly overridden. Call after editing
/// masses or geometry.
void refresh_derived(ParameterSet& p);

/// Every violated invariant, one message each. Empty when valid.
std::vector<std::string> validate(const ParameterSet& p);

/// Throws ConfigError listing all violations.
void require_valid(const ParameterSet& p);

ParameterSet parse_parameters(const std::string& text);
ParameterSet load_parameters(const std::filesystem::path& path);
std::string serialize_parameters(const ParameterSet& p);

/// Scales the rear-body (rider-carrying) mass; geometry is left unchanged.
ParameterSet with_rider_mass_scale(ParameterSet p, double scale);

}  // namespace motobs
