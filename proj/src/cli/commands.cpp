#include "motobs/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "motobs/error.hpp"
#include "motobs/estimator/measurement_io.hpp"

namespace motobs {

namespace fs = std::filesystem;

const char* const kStateNames[14] = {"psi",  "phi",  "delta",  "vx",   "vy",
                                     "dpsi", "dphi", "ddelta", "dthf", "dthr",
                                     "Ffx",  "Frx",  "Ffy",    "Fry"};

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double percent_of(double error, double reference) {
  return std::abs(reference) > 1e-9 ? 100.0 * std::abs(error) / std::abs(reference) : kNaN;
}

void check_speed(double speed_kph) {
  const double v = kph_to_mps(speed_kph);
  if (!(v >= kTrimMinSpeed && v <= kTrimMaxSpeed)) {
    std::ostringstream os;
    os << "speed " << speed_kph << " kph is outside the trim range [" << kTrimMinSpeed * 3.6
       << ", " << kTrimMaxSpeed * 3.6 << "] kph";
    throw ConfigError(os.str());
  }
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("cannot create output directory " + dir.string());
  }
}

}  // namespace

std::size_t final_window_begin(const std::vector<double>& t, double fraction) {
  if (t.empty()) return 0;
  const double cut = t.back() - fraction * (t.back() - t.front());
  const auto it = std::lower_bound(t.begin(), t.end(), cut - 1e-12);
  return std::min(static_cast<std::size_t>(it - t.begin()), t.size() - 1);
}

std::vector<StateMetric> static_error_metrics(const Trajectory& plant,
                                              const EstimateTrajectory& est) {
  const std::size_t n = std::min(plant.size(), est.size());
  std::vector<StateMetric> out;
  if (n == 0) return out;
  const std::vector<double> t(plant.t.begin(), plant.t.begin() + static_cast<long>(n));
  const std::size_t k0 = final_window_begin(t);
  const double count = static_cast<double>(n - k0);
  for (int i = 0; i < 14; ++i) {
    StateMetric m;
    m.name = kStateNames[i];
    double sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double e = est.X_hat[k](i) - plant.X[k](i);
      sq += e * e;
      if (k >= k0) {
        m.reference += plant.X[k](i);
        m.estimate += est.X_hat[k](i);
        m.static_error += e;
      }
    }
    m.reference /= count;
    m.estimate /= count;
    m.static_error /= count;
    m.percent_error = percent_of(m.static_error, m.reference);
    m.rms_error = std::sqrt(sq / static_cast<double>(n));
    out.push_back(m);
  }
  return out;
}

std::string metrics_csv(const std::vector<StateMetric>& metrics) {
  std::string s = "state,reference,estimate,static_error,percent_error,rms_error\n";
  for (const auto& m : metrics) {
    s += m.name;
    for (double v : {m.reference, m.estimate, m.static_error, m.percent_error, m.rms_error}) {
      s += ',';
      s += format_number(v);
    }
    s += '\n';
  }
  return s;
}

const StateMetric& RunResult::metric(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return m;
  }
  throw ConfigError("no metric named '" + name + "'");
}

GainOptions cli_gain_options(bool strict) {
  GainOptions o;
  o.allow_marginal_unobservable = !strict;
  return o;
}

RunResult run_scenario(const Scenario& sc, bool strict_design) {
  check_speed(sc.speed_kph);
  check_speed(sc.plant.speed_kph);
  check_speed(sc.observer.design_speed_kph);

  RunResult r;
  r.scenario = sc;
  r.nominal = load_parameters(sc.params);
  r.plant_params = r.nominal;
  if (sc.plant.rider_mass_scale != 1.0) {
    r.plant_params = with_rider_mass_scale(r.nominal, sc.plant.rider_mass_scale);
  }

  r.plant_trim = find_trim(kph_to_mps(sc.plant.speed_kph), r.plant_params);
  const TrimPoint design_trim = find_trim(kph_to_mps(sc.observer.design_speed_kph), r.nominal);
  r.design = design_observer(design_trim, r.nominal, sc.observer.Q_w, sc.observer.R_w,
                             cli_gain_options(strict_design));

  ExtendedState X0 = r.plant_trim.X_star;
  if (sc.plant.initial == InitialRule::kExplicit) {
    X0 = sc.plant.state;
  } else {
    X0(xi::vx) += sc.plant.vx_offset;
  }

  const InputTrace inputs = build_inputs(sc, r.plant_trim.u_star, sc.dt);
  r.plant = simulate(X0, inputs, sc.dt, sc.duration, r.plant_params);
  r.measurements = synthesize_measurements(r.plant, sc.noise);

  Vector14 x_hat0 = Vector14::Zero();
  switch (sc.observer.initial) {
    case InitialRule::kTrim:
      break;
    case InitialRule::kNoSlip:
      x_hat0 = no_slip_initial_estimate(kph_to_mps(sc.speed_kph), r.nominal) -
               design_trim.X_star;
      break;
    case InitialRule::kExplicit:
      x_hat0 = sc.observer.state - design_trim.X_star;
      break;
  }
  r.estimate = run_observer(r.measurements, inputs, r.design, x_hat0, sc.dt);
  r.metrics = static_error_metrics(r.plant, r.estimate);
  return r;
}

void write_run_outputs(const RunResult& r, const fs::path& dir) {
  ensure_directory(dir);
  write_trajectory_csv(r.plant, dir / "plant.csv");
  write_measurement_csv(r.measurements, dir / "measurements.csv");
  write_estimate_csv(r.estimate, dir / "estimate.csv");
  write_text_file(dir / "metrics.csv", metrics_csv(r.metrics));
}

TrimPoint cmd_trim(const fs::path& params, double speed_kph, const std::optional<fs::path>& out,
                   std::ostream& report) {
  const ParameterSet p = load_parameters(params);
  check_speed(speed_kph);
  const TrimPoint tp = find_trim(kph_to_mps(speed_kph), p);
  report << "trim at " << speed_kph << " kph\n";
  report << "  v_x*      = " << format_number(tp.X_star(xi::vx)) << " m/s\n";
  report << "  dtheta_f* = " << format_number(tp.X_star(xi::dtheta_f)) << " rad/s\n";
  report << "  dtheta_r* = " << format_number(tp.X_star(xi::dtheta_r)) << " rad/s\n";
  report << "  F_fx*     = " << format_number(tp.X_star(xi::Ffx)) << " N\n";
  report << "  F_rx*     = " << format_number(tp.X_star(xi::Frx)) << " N\n";
  report << "  tau_D*    = " << format_number(tp.u_star(ui::tau_D)) << " N m\n";
  report << "  residual  = " << format_number(tp.residual_norm) << " after " << tp.iterations
         << " iterations\n";
  if (out) write_text_file(*out, trim_csv(tp));
  return tp;
}

LinearObserverDesign cmd_design(const fs::path& params, double speed_kph, double qw_scale,
                                double rw_scale, bool strict, const fs::path& out,
                                std::ostream& report) {
  if (!(qw_scale > 0.0) || !(rw_scale > 0.0)) {
    throw ConfigError("--qw and --rw must be positive");
  }
  const ParameterSet p = load_parameters(params);
  check_speed(speed_kph);
  const TrimPoint tp = find_trim(kph_to_mps(speed_kph), p);
  const LinearObserverDesign d = design_observer(tp, p, qw_scale * Matrix14::Identity(),
                                                 rw_scale * Matrix4::Identity(),
                                                 cli_gain_options(strict));
  write_design_bundle(d, speed_kph, out);
  report << "observer design at " << speed_kph << " kph (Q_w = " << qw_scale
         << " I, R_w = " << rw_scale << " I)\n";
  report << "  observable dimension " << d.observable_dim << " of 14\n";
  for (Eigen::Index k = 0; k < d.unobservable_spectrum.size(); ++k) {
    report << "  unobservable mode at " << format_number(d.unobservable_spectrum(k).real())
           << (d.unobservable_spectrum(k).imag() < 0 ? "" : "+")
           << format_number(d.unobservable_spectrum(k).imag()) << "i\n";
  }
  report << "  Riccati residual on the observable subspace, relative to the weight: "
         << format_number(d.reduced_riccati_residual / std::max(d.reduced_q_norm, 1e-300))
         << "\n";
  report << "  closed-loop spectrum:\n";
  for (Eigen::Index k = 0; k < d.closed_loop_spectrum.size(); ++k) {
    report << "    " << format_number(d.closed_loop_spectrum(k).real())
           << (d.closed_loop_spectrum(k).imag() < 0 ? "" : "+")
           << format_number(d.closed_loop_spectrum(k).imag()) << "i\n";
  }
  report << "  bundle written to " << out.string() << "\n";
  return d;
}

RunResult cmd_run(const fs::path& scenario, const fs::path& out, bool strict_design,
                  std::ostream& report) {
  const Scenario sc = load_scenario(scenario);
  RunResult r = run_scenario(sc, strict_design);
  write_run_outputs(r, out);
  report << "scenario " << sc.name << ": " << r.plant.size() << " samples, dt " << sc.dt
         << " s\n";
  report << "  plant trim " << sc.plant.speed_kph << " kph, observer design "
         << sc.observer.design_speed_kph << " kph";
  if (sc.plant.rider_mass_scale != 1.0) {
    report << ", rider mass x" << sc.plant.rider_mass_scale;
  }
  report << "\n  static errors over the final " << kStaticWindowFraction * 100.0
         << "% of the run:\n";
  for (const auto& m : r.metrics) {
    report << "    " << m.name << ": " << format_number(m.static_error) << " ("
           << format_number(m.percent_error) << " %)\n";
  }
  if (r.plant.failure) {
    throw NumericError("plant simulation failed in scenario " + sc.name + ": " +
                       *r.plant.failure);
  }
  if (r.estimate.failure) {
    throw NumericError("observer failed in scenario " + sc.name + ": " + *r.estimate.failure);
  }
  return r;
}

Comparison compare_tables(const CsvTable& reference, const CsvTable& estimate) {
  const std::vector<double> t_ref = reference.column("t");
  const std::vector<double> t_est = estimate.column("t");
  if (t_ref.empty() || t_est.empty()) throw ConfigError("cannot compare empty traces");

  std::vector<std::string> channels;
  for (const auto& name : reference.header) {
    if (name == "t") continue;
    if (!estimate.find(name)) {
      throw ConfigError("estimate is missing CSV column '" + name + "'");
    }
    channels.push_back(name);
  }

  Comparison c;
  c.resampled = t_ref.size() != t_est.size();
  for (std::size_t k = 0; !c.resampled && k < t_ref.size(); ++k) {
    c.resampled = std::abs(t_ref[k] - t_est[k]) > 1e-9;
  }
  // Zero-order hold: the latest estimate sample at or before each reference time.
  std::vector<std::size_t> src(t_ref.size());
  for (std::size_t k = 0, j = 0; k < t_ref.size(); ++k) {
    while (j + 1 < t_est.size() && t_est[j + 1] <= t_ref[k] + 1e-12) ++j;
    src[k] = j;
  }

  const std::size_t k0 = final_window_begin(t_ref);
  const double n_window = static_cast<double>(t_ref.size() - k0);
  for (const auto& name : channels) {
    const std::vector<double> ref = reference.column(name);
    const std::vector<double> est = estimate.column(name);
    ChannelMetric m;
    m.name = name;
    double sq = 0.0;
    double ref_mean = 0.0;
    for (std::size_t k = 0; k < t_ref.size(); ++k) {
      const double e = est[src[k]] - ref[k];
      sq += e * e;
      if (k >= k0) {
        m.static_error += e;
        ref_mean += ref[k];
      }
    }
    m.rms = std::sqrt(sq / static_cast<double>(t_ref.size()));
    m.static_error /= n_window;
    ref_mean /= n_window;
    m.percent_static_error = percent_of(m.static_error, ref_mean);
    c.channels.push_back(m);
  }
  return c;
}

std::string comparison_csv(const Comparison& c) {
  std::string s = "channel,rms,static_error,percent_static_error\n";
  for (const auto& m : c.channels) {
    s += m.name;
    for (double v : {m.rms, m.static_error, m.percent_static_error}) {
      s += ',';
      s += format_number(v);
    }
    s += '\n';
  }
  return s;
}

Comparison cmd_compare(const fs::path& reference, const fs::path& estimate,
                       const std::optional<fs::path>& out, std::ostream& report,
                       std::ostream& warn) {
  const Comparison c = compare_tables(read_csv(reference), read_csv(estimate));
  if (c.resampled) {
    warn << "warning: time grids differ; estimate resampled onto the reference grid by "
              "zero-order hold\n";
  }
  const std::string table = comparison_csv(c);
  if (out) {
    write_text_file(*out, table);
  } else {
    report << table;
  }
  return c;
}

}  // namespace motobs
