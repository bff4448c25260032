#include "motobs/core/params.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "motobs/error.hpp"

namespace motobs {

double total_mass(const ParameterSet& p) {
  return p.m_Gr + p.m_Gf + p.m_Rf + p.m_Rr;
}

double derived_l_m(const ParameterSet& p) {
  // Body COM x-coordinates from the frame chain at q = 0:
  //   G_r at 0, R_r at -l_r, and the front bodies at R_eps([a,0,0] + [.,0,.]).
  const double ce = std::cos(p.eps);
  const double se = std::sin(p.eps);
  const double x_Gf = (p.a + p.e) * ce - p.f * se;
  const double x_Rf = (p.a + p.c) * ce + p.s * se;
  const double x_Rr = -p.l_r;
  const double m = total_mass(p);
  return (p.m_Gf * x_Gf + p.m_Rf * x_Rf + p.m_Rr * x_Rr) / m;
}

void refresh_derived(ParameterSet& p) {
  if (!p.l_m_overridden && total_mass(p) > 0.0) p.l_m = derived_l_m(p);
}

ParameterSet with_rider_mass_scale(ParameterSet p, double scale) {
  p.m_Gr *= scale;
  refresh_derived(p);
  return p;
}

namespace {

void check_positive(std::vector<std::string>& out, const char* name, double v) {
  if (!(std::isfinite(v) && v > 0.0)) {
    out.push_back(std::string(name) + " must be strictly positive (got " +
                  std::to_string(v) + ")");
  }
}

void check_inertia(std::vector<std::string>& out, const char* name,
                   const Matrix3& J) {
  if (!J.allFinite()) {
    out.push_back(std::string(name) + " has non-finite entries");
    return;
  }
  if ((J - J.transpose()).cwiseAbs().maxCoeff() >= 1e-12) {
    out.push_back(std::string(name) + " is not symmetric");
  }
  for (int i = 0; i < 3; ++i) {
    if (J(i, i) < 0.0) {
      out.push_back(std::string(name) + " has a negative diagonal entry");
      break;
    }
  }
}

void check_channel(std::vector<std::string>& out, const std::string& name,
                   const MagicFormulaChannel& ch) {
  if (!(ch.B > 0.0)) out.push_back(name + ".B must be > 0");
  if (!(ch.C > 0.0 && ch.C <= 3.0)) out.push_back(name + ".C must lie in (0, 3]");
  if (!(ch.D > 0.0)) out.push_back(name + ".D must be > 0");
  if (!(ch.E <= 1.0)) out.push_back(name + ".E must be <= 1");
}

void check_tire(std::vector<std::string>& out, const std::string& wheel,
                const TireCoefficients& t) {
  check_channel(out, "tires." + wheel + ".longitudinal", t.longitudinal);
  check_channel(out, "tires." + wheel + ".side_slip", t.side_slip);
  check_channel(out, "tires." + wheel + ".camber", t.camber);
}

}  // namespace

std::vector<std::string> validate(const ParameterSet& p) {
  std::vector<std::string> out;
  check_positive(out, "m_Gr", p.m_Gr);
  check_positive(out, "m_Gf", p.m_Gf);
  check_positive(out, "m_Rf", p.m_Rf);
  check_positive(out, "m_Rr", p.m_Rr);
  check_positive(out, "R_f", p.R_f);
  check_positive(out, "R_r", p.R_r);
  check_positive(out, "sigma_fx", p.sigma_fx);
  check_positive(out, "sigma_rx", p.sigma_rx);
  check_positive(out, "sigma_fy", p.sigma_fy);
  check_positive(out, "sigma_ry", p.sigma_ry);
  check_positive(out, "rho_air", p.rho_air);
  check_positive(out, "A_v", p.A_v);
  check_inertia(out, "J_Gr", p.J_Gr);
  check_inertia(out, "J_Gf", p.J_Gf);
  check_inertia(out, "J_Rf", p.J_Rf);
  check_inertia(out, "J_Rr", p.J_Rr);
  if (!(p.l_f + p.l_r > 0.0)) out.push_back("l_f + l_r must be positive");
  if (!(std::abs(p.l_m) < p.l_f)) {
    out.push_back("|l_m| must be smaller than l_f (front static load must be positive)");
  }
  if (!(p.C_d >= 0.0)) out.push_back("C_d must be non-negative");
  if (!(p.K_delta >= 0.0)) out.push_back("K_delta must be non-negative");
  if (!std::isfinite(p.g)) out.push_back("g must be finite");
  check_tire(out, "front", p.tire_front);
  check_tire(out, "rear", p.tire_rear);
  return out;
}

void require_valid(const ParameterSet& p) {
  const auto issues = validate(p);
  if (issues.empty()) return;
  std::string msg = "invalid parameter set:";
  for (const auto& i : issues) msg += "\n  - " + i;
  throw ConfigError(msg);
}

namespace {

class Reader {
 public:
  explicit Reader(const YAML::Node& root) : root_(root) {}

  double scalar(const char* key) {
    const YAML::Node n = root_[key];
    if (!n) {
      missing_.push_back(key);
      return 0.0;
    }
    return as_double(n, key);
  }

  std::optional<double> optional(const char* key) {
    const YAML::Node n = root_[key];
    if (!n) return std::nullopt;
    return as_double(n, key);
  }

  Matrix3 tensor(const char* key) {
    const YAML::Node n = root_[key];
    if (!n) {
      missing_.push_back(key);
      return Matrix3::Zero();
    }
    if (!n.IsSequence() || n.size() != 9) {
      malformed_.push_back(std::string(key) + " must be a list of 9 row-major numbers");
      return Matrix3::Zero();
    }
    Matrix3 J;
    for (int i = 0; i < 9; ++i) J(i / 3, i % 3) = as_double(n[i], key);
    return J;
  }

  MagicFormulaChannel channel(const std::string& wheel, const char* name) {
    const std::string path = "tires." + wheel + "." + name;
    const YAML::Node tires = root_["tires"];
    const YAML::Node n = tires ? tires[wheel][name] : YAML::Node();
    MagicFormulaChannel ch;
    if (!n) {
      missing_.push_back(path);
      return ch;
    }
    auto field = [&](const char* k, double& dst) {
      if (!n[k]) {
        missing_.push_back(path + "." + k);
        return;
      }
      dst = as_double(n[k], (path + "." + k).c_str());
    };
    field("B", ch.B);
    field("C", ch.C);
    field("D", ch.D);
    field("E", ch.E);
    return ch;
  }

  void finish() const {
    if (missing_.empty() && malformed_.empty()) return;
    std::string msg = "parameter file errors:";
    for (const auto& k : missing_) msg += "\n  - missing key '" + k + "'";
    for (const auto& k : malformed_) msg += "\n  - " + k;
    throw ConfigError(msg);
  }

 private:
  double as_double(const YAML::Node& n, const std::string& key) {
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      malformed_.push_back(key + " is not a number");
      return 0.0;
    }
  }

  const YAML::Node& root_;
  std::vector<std::string> missing_;
  std::vector<std::string> malformed_;
};

}  // namespace

ParameterSet parse_parameters(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& ex) {
    throw ConfigError(std::string("cannot parse parameter file: ") + ex.what());
  }
  if (!root.IsMap()) throw ConfigError("parameter file must be a key/value map");

  Reader r(root);
  ParameterSet p;
  p.l_f = r.scalar("l_f");
  p.l_r = r.scalar("l_r");
  p.h = r.scalar("h");
  p.R_f = r.scalar("R_f");
  p.R_r = r.scalar("R_r");
  p.s = r.scalar("s");
  p.e = r.scalar("e");
  p.f = r.scalar("f");
  p.a = r.scalar("a");
  p.c = r.scalar("c");
  if (auto eps = r.optional("eps")) {
    p.eps = *eps;
  } else {
    p.eps = r.scalar("eps_deg") * std::numbers::pi / 180.0;
  }
  p.m_Gr = r.scalar("m_Gr");
  p.m_Gf = r.scalar("m_Gf");
  p.m_Rf = r.scalar("m_Rf");
  p.m_Rr = r.scalar("m_Rr");
  p.J_Gr = r.tensor("J_Gr");
  p.J_Gf = r.tensor("J_Gf");
  p.J_Rf = r.tensor("J_Rf");
  p.J_Rr = r.tensor("J_Rr");
  p.sigma_fx = r.scalar("sigma_fx");
  p.sigma_rx = r.scalar("sigma_rx");
  p.sigma_fy = r.scalar("sigma_fy");
  p.sigma_ry = r.scalar("sigma_ry");
  p.C_d = r.scalar("C_d");
  p.A_v = r.scalar("A_v");
  p.rho_air = r.scalar("rho_air");
  p.K_delta = r.scalar("K_delta");
  if (auto g = r.optional("g")) p.g = *g;
  if (auto lm = r.optional("l_m")) {
    p.l_m = *lm;
    p.l_m_overridden = true;
  }
  for (const std::string wheel : {"front", "rear"}) {
    TireCoefficients& t = wheel == "front" ? p.tire_front : p.tire_rear;
    t.longitudinal = r.channel(wheel, "longitudinal");
    t.side_slip = r.channel(wheel, "side_slip");
    t.camber = r.channel(wheel, "camber");
  }
  if (const YAML::Node opt = root["options"]) {
    if (const YAML::Node n = opt["lateral_relaxation_speed"]) {
      const auto v = n.as<std::string>();
      if (v == "lateral") {
        p.options.lateral_relaxation = LateralRelaxationSpeed::kLateral;
      } else if (v == "forward") {
        p.options.lateral_relaxation = LateralRelaxationSpeed::kForward;
      } else {
        throw ConfigError("options.lateral_relaxation_speed must be 'forward' or 'lateral'");
      }
    }
    if (const YAML::Node n = opt["front_arm_caster"]) {
      p.options.front_arm_caster = n.as<bool>();
    }
  }
  r.finish();
  refresh_derived(p);
  require_valid(p);
  return p;
}

ParameterSet load_parameters(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open parameter file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_parameters(ss.str());
}

namespace {

void emit_tensor(YAML::Emitter& out, const char* key, const Matrix3& J) {
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (int i = 0; i < 9; ++i) out << J(i / 3, i % 3);
  out << YAML::EndSeq;
}

void emit_channel(YAML::Emitter& out, const char* key, const MagicFormulaChannel& ch) {
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "B" << YAML::Value << ch.B;
  out << YAML::Key << "C" << YAML::Value << ch.C;
  out << YAML::Key << "D" << YAML::Value << ch.D;
  out << YAML::Key << "E" << YAML::Value << ch.E;
  out << YAML::EndMap;
}

void emit_tire(YAML::Emitter& out, const char* key, const TireCoefficients& t) {
  out << YAML::Key << key << YAML::Value << YAML::BeginMap;
  emit_channel(out, "longitudinal", t.longitudinal);
  emit_channel(out, "side_slip", t.side_slip);
  emit_channel(out, "camber", t.camber);
  out << YAML::EndMap;
}

}  // namespace

std::string serialize_parameters(const ParameterSet& p) {
  YAML::Emitter out;
  out.SetDoublePrecision(std::numeric_limits<double>::max_digits10);
  out << YAML::BeginMap;
  auto kv = [&](const char* k, double v) { out << YAML::Key << k << YAML::Value << v; };
  kv("l_f", p.l_f);
  kv("l_r", p.l_r);
  if (p.l_m_overridden) kv("l_m", p.l_m);
  kv("h", p.h);
  kv("R_f", p.R_f);
  kv("R_r", p.R_r);
  kv("s", p.s);
  kv("e", p.e);
  kv("f", p.f);
  kv("a", p.a);
  kv("c", p.c);
  kv("eps", p.eps);
  kv("m_Gr", p.m_Gr);
  kv("m_Gf", p.m_Gf);
  kv("m_Rf", p.m_Rf);
  kv("m_Rr", p.m_Rr);
  emit_tensor(out, "J_Gr", p.J_Gr);
  emit_tensor(out, "J_Gf", p.J_Gf);
  emit_tensor(out, "J_Rf", p.J_Rf);
  emit_tensor(out, "J_Rr", p.J_Rr);
  kv("sigma_fx", p.sigma_fx);
  kv("sigma_rx", p.sigma_rx);
  kv("sigma_fy", p.sigma_fy);
  kv("sigma_ry", p.sigma_ry);
  kv("C_d", p.C_d);
  kv("A_v", p.A_v);
  kv("rho_air", p.rho_air);
  kv("K_delta", p.K_delta);
  kv("g", p.g);
  out << YAML::Key << "tires" << YAML::Value << YAML::BeginMap;
  emit_tire(out, "front", p.tire_front);
  emit_tire(out, "rear", p.tire_rear);
  out << YAML::EndMap;
  out << YAML::Key << "options" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "lateral_relaxation_speed" << YAML::Value
      << (p.options.lateral_relaxation == LateralRelaxationSpeed::kLateral ? "lateral"
                                                                         : "forward");
  out << YAML::Key << "front_arm_caster" << YAML::Value << p.options.front_arm_caster;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace motobs
