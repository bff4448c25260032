#include "motobs/cli/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "motobs/error.hpp"
#include "motobs/io/csv.hpp"

namespace motobs {

namespace fs = std::filesystem;

namespace {

double number(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError("scenario key '" + key + "' must be a number");
  }
}

double required(const YAML::Node& parent, const std::string& key, const std::string& where) {
  const YAML::Node n = parent[key];
  if (!n) throw ConfigError("scenario is missing '" + where + key + "'");
  return number(n, where + key);
}

double optional(const YAML::Node& parent, const std::string& key, double fallback,
                const std::string& where) {
  const YAML::Node n = parent[key];
  return n ? number(n, where + key) : fallback;
}

std::string text(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<std::string>();
  } catch (const YAML::Exception&) {
    throw ConfigError("scenario key '" + key + "' must be a string");
  }
}

template <int N>
Eigen::Matrix<double, N, 1> vector_of(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence() || n.size() != N) {
    throw ConfigError("scenario key '" + key + "' must be a list of " + std::to_string(N) +
                      " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = number(n[i], key);
  return v;
}

/// Scalar s gives s * I; a list gives the diagonal.
template <int N>
Eigen::Matrix<double, N, N> weight_of(const YAML::Node& n, const std::string& key) {
  Eigen::Matrix<double, N, 1> diag;
  if (n.IsScalar()) {
    diag.setConstant(number(n, key));
  } else {
    diag = vector_of<N>(n, key);
  }
  if ((diag.array() <= 0.0).any()) {
    throw ConfigError("scenario weight '" + key + "' must be positive");
  }
  return diag.asDiagonal();
}

InitialRule rule_of(const YAML::Node& n, const std::string& key) {
  const std::string v = text(n, key);
  if (v == "trim") return InitialRule::kTrim;
  if (v == "no_slip") return InitialRule::kNoSlip;
  if (v == "explicit") return InitialRule::kExplicit;
  throw ConfigError("scenario key '" + key + "' must be trim, no_slip or explicit");
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

Scenario parse_scenario(const std::string& doc, const fs::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(doc);
  } catch (const YAML::Exception& ex) {
    throw ConfigError(std::string("cannot parse scenario: ") + ex.what());
  }
  if (!root.IsMap()) throw ConfigError("scenario must be a key/value map");

  Scenario sc;
  sc.name = root["name"] ? text(root["name"], "name") : "scenario";
  if (!root["params"]) throw ConfigError("scenario is missing 'params'");
  sc.params = resolve(base_dir, text(root["params"], "params"));
  sc.speed_kph = required(root, "speed_kph", "");
  sc.duration = required(root, "duration", "");
  sc.dt = optional(root, "dt", 0.001, "");
  if (!(sc.duration > 0.0)) throw ConfigError("scenario duration must be positive");
  if (!(sc.dt > 0.0 && sc.dt <= kMaxStep)) {
    throw ConfigError("scenario dt must lie in (0, 0.01]");
  }

  if (const YAML::Node in = root["inputs"]) {
    const std::string kind = in["kind"] ? text(in["kind"], "inputs.kind") : "trim";
    if (kind == "trim") {
      sc.inputs.kind = InputKind::kTrim;
    } else if (kind == "constant") {
      sc.inputs.kind = InputKind::kConstant;
      if (!in["torques"]) throw ConfigError("scenario is missing 'inputs.torques'");
      sc.inputs.constant = vector_of<4>(in["torques"], "inputs.torques");
    } else if (kind == "csv") {
      sc.inputs.kind = InputKind::kCsv;
      if (!in["path"]) throw ConfigError("scenario is missing 'inputs.path'");
      sc.inputs.csv = resolve(base_dir, text(in["path"], "inputs.path"));
    } else if (kind == "doublet") {
      sc.inputs.kind = InputKind::kDoublet;
      sc.inputs.doublet.amplitude =
          optional(in, "amplitude", sc.inputs.doublet.amplitude, "inputs.");
      sc.inputs.doublet.start = optional(in, "start", sc.inputs.doublet.start, "inputs.");
      sc.inputs.doublet.period = optional(in, "period", sc.inputs.doublet.period, "inputs.");
      if (!(sc.inputs.doublet.period > 0.0)) {
        throw ConfigError("scenario doublet period must be positive");
      }
    } else {
      throw ConfigError("inputs.kind must be trim, constant, csv or doublet");
    }
  }

  sc.plant.speed_kph = sc.speed_kph;
  if (const YAML::Node pl = root["plant"]) {
    sc.plant.speed_kph = optional(pl, "speed_kph", sc.speed_kph, "plant.");
    sc.plant.rider_mass_scale = optional(pl, "rider_mass_scale", 1.0, "plant.");
    if (!(sc.plant.rider_mass_scale > 0.0)) {
      throw ConfigError("plant.rider_mass_scale must be positive");
    }
    sc.plant.vx_offset = optional(pl, "vx_offset", 0.0, "plant.");
    if (pl["initial"]) sc.plant.initial = rule_of(pl["initial"], "plant.initial");
    if (sc.plant.initial == InitialRule::kNoSlip) {
      throw ConfigError("plant.initial must be trim or explicit");
    }
    if (sc.plant.initial == InitialRule::kExplicit) {
      if (!pl["state"]) throw ConfigError("scenario is missing 'plant.state'");
      sc.plant.state = vector_of<14>(pl["state"], "plant.state");
    }
  }

  sc.observer.design_speed_kph = sc.speed_kph;
  if (const YAML::Node ob = root["observer"]) {
    sc.observer.design_speed_kph = optional(ob, "design_speed_kph", sc.speed_kph, "observer.");
    if (ob["qw"]) sc.observer.Q_w = weight_of<14>(ob["qw"], "observer.qw");
    if (ob["rw"]) sc.observer.R_w = weight_of<4>(ob["rw"], "observer.rw");
    if (ob["init"]) sc.observer.initial = rule_of(ob["init"], "observer.init");
    if (sc.observer.initial == InitialRule::kExplicit) {
      if (!ob["state"]) throw ConfigError("scenario is missing 'observer.state'");
      sc.observer.state = vector_of<14>(ob["state"], "observer.state");
    }
  }

  if (const YAML::Node nz = root["noise"]) {
    MeasurementNoise noise;
    noise.std_dev(mi::ax) = optional(nz, "ax", 0.0, "noise.");
    noise.std_dev(mi::ay) = optional(nz, "ay", 0.0, "noise.");
    noise.std_dev(mi::dpsi) = optional(nz, "dpsi", 0.0, "noise.");
    noise.std_dev(mi::dphi) = optional(nz, "dphi", 0.0, "noise.");
    if ((noise.std_dev.array() < 0.0).any()) {
      throw ConfigError("noise standard deviations must be non-negative");
    }
    noise.seed = static_cast<std::uint64_t>(optional(nz, "seed", 0.0, "noise."));
    sc.noise = noise;
  }
  return sc;
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.parent_path());
}

double doublet_torque(const DoubletSpec& d, double t) {
  const double s = (t - d.start) / d.period;
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double w = 2.0 * std::numbers::pi * s;
  return d.amplitude * std::sin(w) * 0.5 * (1.0 - std::cos(w));
}

InputTrace read_input_csv(const fs::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t it = table.index("t");
  const std::size_t idx[4] = {table.index("tau"), table.index("tau_D"), table.index("tau_Bf"),
                              table.index("tau_Br")};
  std::vector<double> times;
  std::vector<InputVector> values;
  for (const auto& row : table.rows) {
    times.push_back(row[it]);
    InputVector u;
    for (int i = 0; i < 4; ++i) u(i) = row[idx[i]];
    values.push_back(u);
  }
  if (times.empty()) throw ConfigError("input trace " + path.string() + " has no rows");
  return InputTrace(std::move(times), std::move(values));
}

InputTrace build_inputs(const Scenario& sc, const InputVector& u_trim, double dt) {
  switch (sc.inputs.kind) {
    case InputKind::kTrim:
      return InputTrace::constant(u_trim);
    case InputKind::kConstant:
      return InputTrace::constant(sc.inputs.constant);
    case InputKind::kCsv:
      return read_input_csv(sc.inputs.csv);
    case InputKind::kDoublet: {
      const std::size_t n = step_count(sc.duration, dt) + 1;
      std::vector<double> times(n);
      std::vector<InputVector> values(n, u_trim);
      for (std::size_t k = 0; k < n; ++k) {
        times[k] = static_cast<double>(k) * dt;
        values[k](ui::tau) += doublet_torque(sc.inputs.doublet, times[k]);
      }
      return InputTrace(std::move(times), std::move(values));
    }
  }
  return InputTrace::constant(u_trim);
}

}  // namespace motobs
