#include "motobs/estimator/measurement_io.hpp"

#include <algorithm>
#include <system_error>

#include <yaml-cpp/yaml.h>

#include "motobs/error.hpp"
#include "motobs/io/csv.hpp"

namespace motobs {

namespace fs = std::filesystem;

const char* const kMeasurementHeader = "t,ax,ay,dphi,dpsi";
const char* const kEstimateHeader =
    "t,psi,phi,delta,vx,vy,dpsi,dphi,ddelta,dthf,dthr,Ffx,Frx,Ffy,Fry";

namespace {

void append_row(std::string& out, double t, std::initializer_list<double> values) {
  out += format_number(t);
  for (double v : values) {
    out += ',';
    out += format_number(v);
  }
  out += '\n';
}

}  // namespace

std::string measurement_csv(const MeasurementTrace& m) {
  std::string out = kMeasurementHeader;
  out += '\n';
  for (std::size_t k = 0; k < m.size(); ++k) {
    const MeasurementVector& s = m.s[k];
    append_row(out, m.t[k], {s(mi::ax), s(mi::ay), s(mi::dphi), s(mi::dpsi)});
  }
  return out;
}

void write_measurement_csv(const MeasurementTrace& m, const fs::path& path) {
  write_text_file(path, measurement_csv(m));
}

namespace {

MeasurementTrace measurements_from_table(const CsvTable& table) {
  const std::size_t it = table.index("t");
  const std::size_t iax = table.index("ax");
  const std::size_t iay = table.index("ay");
  const std::size_t idphi = table.index("dphi");
  const std::size_t idpsi = table.index("dpsi");
  MeasurementTrace m;
  for (const auto& row : table.rows) {
    m.t.push_back(row[it]);
    MeasurementVector s;
    s(mi::ax) = row[iax];
    s(mi::ay) = row[iay];
    s(mi::dpsi) = row[idpsi];
    s(mi::dphi) = row[idphi];
    m.s.push_back(s);
  }
  return m;
}

}  // namespace

MeasurementTrace parse_measurement_csv(const std::string& text, const std::string& source) {
  return measurements_from_table(parse_csv(text, source));
}

MeasurementTrace read_measurement_csv(const fs::path& path) {
  return measurements_from_table(read_csv(path));
}

std::string estimate_csv(const EstimateTrajectory& est) {
  std::string out = kEstimateHeader;
  out += '\n';
  for (std::size_t k = 0; k < est.size(); ++k) {
    out += format_number(est.t[k]);
    for (int i = 0; i < 14; ++i) {
      out += ',';
      out += format_number(est.X_hat[k](i));
    }
    out += '\n';
  }
  return out;
}

void write_estimate_csv(const EstimateTrajectory& est, const fs::path& path) {
  write_text_file(path, estimate_csv(est));
}

std::string matrix_csv(const Eigen::MatrixXd& M) {
  std::string out;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_number(M(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string trim_csv(const TrimPoint& tp) {
  std::string out = kEstimateHeader + 2;  // drop the leading "t,"
  out += ",tau,tau_D,tau_Bf,tau_Br,residual_norm,iterations\n";
  for (int i = 0; i < 14; ++i) {
    out += format_number(tp.X_star(i));
    out += ',';
  }
  for (int i = 0; i < 4; ++i) {
    out += format_number(tp.u_star(i));
    out += ',';
  }
  out += format_number(tp.residual_norm);
  out += ',';
  out += std::to_string(tp.iterations);
  out += '\n';
  return out;
}

namespace {

std::string spectrum_csv(const Eigen::VectorXcd& ev) {
  std::string out = "real,imag\n";
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    out += format_number(ev(k).real());
    out += ',';
    out += format_number(ev(k).imag());
    out += '\n';
  }
  return out;
}

}  // namespace

void write_design_bundle(const LinearObserverDesign& d, double speed_kph, const fs::path& dir) {
  std::error_code ec;
  const fs::path target = fs::absolute(dir, ec);
  if (ec) throw ConfigError("cannot resolve output directory " + dir.string());
  fs::path staging = target;
  staging += ".partial";
  fs::remove_all(staging, ec);
  if (!fs::create_directories(staging, ec) && ec) {
    throw ConfigError("cannot create output directory " + staging.string() + ": " +
                      ec.message());
  }
  try {
    write_text_file(staging / "A.csv", matrix_csv(d.A));
    write_text_file(staging / "B.csv", matrix_csv(d.B));
    write_text_file(staging / "C.csv", matrix_csv(d.C));
    write_text_file(staging / "D.csv", matrix_csv(d.D));
    write_text_file(staging / "G.csv", matrix_csv(d.G));
    write_text_file(staging / "P.csv", matrix_csv(d.P));
    write_text_file(staging / "spectrum.csv", spectrum_csv(d.closed_loop_spectrum));
    write_text_file(staging / "trim.csv", trim_csv(d.trim));

    YAML::Emitter y;
    y.SetDoublePrecision(17);
    y << YAML::BeginMap;
    y << YAML::Key << "speed_kph" << YAML::Value << speed_kph;
    y << YAML::Key << "state_order" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const char* name : {"psi", "phi", "delta", "vx", "vy", "dpsi", "dphi", "ddelta",
                             "dthf", "dthr", "Ffx", "Frx", "Ffy", "Fry"}) {
      y << name;
    }
    y << YAML::EndSeq;
    y << YAML::Key << "input_order" << YAML::Value << YAML::Flow << YAML::BeginSeq << "tau"
      << "tau_D" << "tau_Bf" << "tau_Br" << YAML::EndSeq;
    y << YAML::Key << "measurement_order" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << "ax" << "ay" << "dpsi" << "dphi" << YAML::EndSeq;
    y << YAML::Key << "matrices" << YAML::Value << YAML::BeginMap;
    auto entry = [&](const char* name, Eigen::Index r, Eigen::Index c) {
      y << YAML::Key << name << YAML::Value << YAML::Flow << YAML::BeginMap;
      y << YAML::Key << "file" << YAML::Value << std::string(name) + ".csv";
      y << YAML::Key << "rows" << YAML::Value << static_cast<int>(r);
      y << YAML::Key << "cols" << YAML::Value << static_cast<int>(c);
      y << YAML::EndMap;
    };
    entry("A", 14, 14);
    entry("B", 14, 4);
    entry("C", 4, 14);
    entry("D", 4, 4);
    entry("G", 14, 4);
    entry("P", 14, 14);
    y << YAML::EndMap;
    y << YAML::Key << "observable_dimension" << YAML::Value << d.observable_dim;
    y << YAML::Key << "max_real_closed_loop" << YAML::Value
      << max_real_part(d.closed_loop_spectrum);
    y << YAML::Key << "stability_threshold" << YAML::Value << d.stability_threshold;
    y << YAML::Key << "riccati_residual" << YAML::Value << d.riccati_residual;
    y << YAML::Key << "reduced_riccati_residual" << YAML::Value << d.reduced_riccati_residual;
    y << YAML::Key << "reduced_riccati_relative_residual" << YAML::Value
      << d.reduced_riccati_residual / std::max(d.reduced_q_norm, 1e-300);
    y << YAML::Key << "unobservable_eigenvalues" << YAML::Value << YAML::BeginSeq;
    for (Eigen::Index k = 0; k < d.unobservable_spectrum.size(); ++k) {
      y << YAML::Flow << YAML::BeginSeq << d.unobservable_spectrum(k).real()
        << d.unobservable_spectrum(k).imag() << YAML::EndSeq;
    }
    y << YAML::EndSeq;
    y << YAML::EndMap;
    write_text_file(staging / "manifest.yaml", std::string(y.c_str()) + "\n");
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  fs::remove_all(target, ec);
  fs::rename(staging, target, ec);
  if (ec) {
    fs::remove_all(staging, ec);
    throw ConfigError("cannot move design bundle into " + target.string());
  }
}

}  // namespace motobs
