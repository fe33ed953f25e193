// qtele: command-line driver for the teleportation noise experiments.
//
// Exit codes: 0 success, 2 usage error, 3 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

#include "qtele/experiment.hpp"

namespace ex = qtele::experiment;
using namespace qtele;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string case_name;
  std::string axes = "z";
  std::optional<double> kappa_tau;
  std::string sweep;
  std::size_t theta_grid = 41;
  std::size_t phi_grid = 41;
  std::size_t quad_theta = 32;
  std::size_t quad_phi = 32;
  double dt = 0.0;
  std::string out;
  std::string format;  // empty: csv, or json for channel reports
  bool with_oracle = false;
  std::optional<double> fix_asymptote;
  std::string channel;
  std::string program = "cnot";
};

struct Context {
  std::string command;
  std::chrono::system_clock::time_point started = std::chrono::system_clock::now();
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
};

IntegratorConfig integrator(const Options& o) {
  if (o.dt < 0) throw ex::UsageError("--dt must be > 0 (or 0 for automatic)");
  IntegratorConfig cfg;
  cfg.dt = o.dt;
  return cfg;
}

std::vector<double> kappa_grid(const Options& o, const char* default_sweep) {
  if (o.kappa_tau && !o.sweep.empty()) throw ex::UsageError("use either --kappa-tau or --kappa-tau-sweep");
  if (o.kappa_tau) return {*o.kappa_tau};
  return ex::parse_sweep(o.sweep.empty() ? default_sweep : o.sweep);
}

void check_grid(std::size_t n, const char* flag) {
  if (n < 1 || n > 100000) throw ex::UsageError(std::string(flag) + " must be between 1 and 100000");
}

ex::RunManifest manifest_for(const Context& ctx, const char* sub, const Options& o) {
  ex::RunManifest m;
  m.id = ex::new_run_id(ctx.started);
  m.command = ctx.command;
  m.subcommand = sub;
  m.output = o.out;
  m.started_at = ex::iso_utc(ctx.started);
  m.integrator = integrator(o);
  m.workers = worker_count();
  return m;
}

// Writes `data` to --out (plus its manifest) or to stdout.
void emit(const Context& ctx, const Options& o, ex::RunManifest m, const std::string& data) {
  if (o.out.empty()) {
    std::cout << data;
    std::cout.flush();
    return;
  }
  ex::write_text_file(o.out, data);
  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.t0).count();
  ex::write_text_file(ex::manifest_path(o.out), m.to_json().dump(2) + '\n');
}

NoiseCase noise_case(const Options& o, double kappa_tau) {
  NoiseCase c{ex::parse_case(o.case_name), ex::parse_axes(o.axes), kappa_tau};
  c.validate();
  return c;
}

int cmd_surface(const Context& ctx, const Options& o) {
  if (!o.kappa_tau) throw ex::UsageError("surface needs --kappa-tau");
  check_grid(o.theta_grid, "--theta-grid");
  check_grid(o.phi_grid, "--phi-grid");
  const ex::Format format = o.format.empty() ? ex::Format::csv : ex::parse_format(o.format);
  const NoiseCase c = noise_case(o, *o.kappa_tau);
  const Surface s = fidelity_surface(c, theta_grid(o.theta_grid), phi_grid(o.phi_grid), integrator(o));
  ex::RunManifest m = manifest_for(ctx, "surface", o);
  m.noise = c;
  m.kappa_tau = {c.kappa_tau};
  m.theta_points = o.theta_grid;
  m.phi_points = o.phi_grid;
  emit(ctx, o, m, format == ex::Format::csv ? ex::surface_csv(s) : ex::surface_json(s, c).dump(2) + '\n');
  return 0;
}

int cmd_average(const Context& ctx, const Options& o) {
  const ex::Format format = o.format.empty() ? ex::Format::csv : ex::parse_format(o.format);
  const std::vector<double> grid = kappa_grid(o, "0:5:21");
  const NoiseCase c = noise_case(o, grid.front());
  for (double kt : grid) noise_case(o, kt);
  const QuadratureSpec quad{o.quad_theta, o.quad_phi};
  try {
    quad.validate();
  } catch (const std::invalid_argument& e) {
    throw ex::UsageError(e.what());
  }
  std::optional<oracle::Tag> tag;
  if (o.with_oracle) {
    tag = ex::oracle_tag(c.tag, c.axes);
    if (!tag) throw ex::UsageError("no closed-form average for case " + std::string(1, case_name(c.tag)) + " axes " + o.axes);
  }
  const auto rows = ex::average_rows(average_sweep(c.tag, c.axes, grid, quad, integrator(o)), tag);

  // Fit the values exactly as printed so the report can be reproduced from the file.
  std::optional<DecayFit> fit;
  std::string fit_note;
  try {
    fit = fit_exponential(ex::as_printed(rows), o.fix_asymptote);
  } catch (const std::invalid_argument& e) {
    fit_note = e.what();
  }

  ex::RunManifest m = manifest_for(ctx, "average", o);
  m.noise = c;
  m.kappa_tau = grid;
  m.quadrature = quad;
  if (tag) m.extra["oracle"] = oracle::tag_name(*tag);

  std::string data;
  if (format == ex::Format::csv) {
    data = ex::average_csv(rows);
  } else {
    ex::json j = ex::average_json(rows, c);
    if (fit) j["fit"] = ex::fit_json(*fit, rows.size());
    data = j.dump(2) + '\n';
  }
  emit(ctx, o, m, data);

  const std::string report = fit ? ex::fit_json(*fit, rows.size()).dump(2) + '\n' : std::string();
  if (!fit) {
    std::cerr << "fit skipped: " << fit_note << '\n';
  } else if (o.out.empty()) {
    std::cerr << report;
  } else {
    ex::write_text_file(ex::fit_path(o.out), report);
  }
  return 0;
}

int cmd_gcurve(const Context& ctx, const Options& o) {
  check_grid(o.theta_grid, "--theta-grid");
  const ex::Format format = o.format.empty() ? ex::Format::csv : ex::parse_format(o.format);
  const std::vector<double> grid = kappa_grid(o, "0:3:31");
  const NoiseCase c = noise_case(o, grid.front());
  for (double kt : grid) noise_case(o, kt);
  if (c.tag != CaseTag::C && c.tag != CaseTag::D) throw ex::UsageError("gcurve needs --case C or D");
  const auto pts = g_statistic(c.tag, c.axes, grid, integrator(o), o.theta_grid);
  ex::RunManifest m = manifest_for(ctx, "gcurve", o);
  m.noise = c;
  m.kappa_tau = grid;
  m.theta_points = o.theta_grid;
  m.phi_points = 1;
  emit(ctx, o, m, format == ex::Format::csv ? ex::gcurve_csv(pts) : ex::gcurve_json(pts, c).dump(2) + '\n');
  return 0;
}

int cmd_channel(const Context& ctx, const Options& o) {
  if (o.channel.empty()) throw ex::UsageError("channel needs --channel");
  check_grid(o.theta_grid, "--theta-grid");
  check_grid(o.phi_grid, "--phi-grid");
  const ex::Format format = o.format.empty() ? ex::Format::json : ex::parse_format(o.format);
  const DensityMatrix rho = ex::parse_channel(o.channel, integrator(o));
  const QuadratureSpec quad{o.quad_theta, o.quad_phi};
  const ex::json report = ex::channel_report(rho, o.channel, theta_grid(o.theta_grid), phi_grid(o.phi_grid), quad);
  ex::RunManifest m = manifest_for(ctx, "channel", o);
  m.theta_points = o.theta_grid;
  m.phi_points = o.phi_grid;
  m.quadrature = quad;
  m.extra["channel"] = o.channel;
  std::string data;
  if (format == ex::Format::json) {
    data = report.dump(2) + '\n';
  } else {
    data = "theta,phi,fidelity\n";
    for (const auto& s : report["samples"]) {
      data += ex::fmt(s["theta"].get<double>()) + ',' + ex::fmt(s["phi"].get<double>()) + ',' +
              ex::fmt(s["fidelity"].get<double>()) + '\n';
    }
  }
  emit(ctx, o, m, data);
  return 0;
}

int cmd_pulses(const Context& ctx, const Options& o) {
  PulseProgram p(2);
  if (o.program == "cnot") {
    p = cnot_pulse(2, 0, 1);
  } else if (o.program == "hadamard") {
    p = hadamard_pulse(1, 0);
  } else if (o.program == "bell") {
    p = bell_measurement_program();
  } else if (o.program == "correction") {
    p = correction_program();
  } else {
    throw ex::UsageError("--program must be cnot, hadamard, bell or correction");
  }
  std::string data = "# qubits=" + std::to_string(p.num_qubits()) + " duration=" + ex::fmt(p.total_duration()) +
                     " global_phase=" + ex::fmt(p.global_phase()) + '\n';
  data += dump_program(p);
  ex::RunManifest m = manifest_for(ctx, "pulses", o);
  m.extra["program"] = o.program;
  emit(ctx, o, m, data);
  return 0;
}

void add_noise_flags(CLI::App* sub, Options& o, bool required_case) {
  auto* opt = sub->add_option("--case", o.case_name, "noise placement: A, B, C or D");
  if (required_case) opt->required();
  sub->add_option("--axes", o.axes, "Pauli axes of the noise: x, z, xyz, ...")->capture_default_str();
  sub->add_option("--dt", o.dt, "RK4 step (0 = automatic)")->capture_default_str();
}

void add_output_flags(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "output file (default: stdout, no manifest)");
  sub->add_option("--format", o.format, "csv or json");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  Context ctx;
  for (int i = 0; i < argc; ++i) ctx.command += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"Noisy quantum teleportation experiments"};
  app.set_version_flag("--version", std::string(ex::kVersion));
  app.require_subcommand(1);

  auto* surface = app.add_subcommand("surface", "fidelity F(theta, phi) on a grid");
  add_noise_flags(surface, o, true);
  surface->add_option("--kappa-tau", o.kappa_tau, "noise exposure kappa*tau");
  surface->add_option("--theta-grid", o.theta_grid, "theta points on [0, pi]")->capture_default_str();
  surface->add_option("--phi-grid", o.phi_grid, "phi points on [0, 2pi)")->capture_default_str();
  add_output_flags(surface, o);

  auto* average = app.add_subcommand("average", "sphere-averaged fidelity over a kappa*tau sweep");
  add_noise_flags(average, o, true);
  average->add_option("--kappa-tau", o.kappa_tau, "single kappa*tau value");
  average->add_option("--kappa-tau-sweep", o.sweep, "start:stop:n (default 0:5:21)");
  average->add_option("--quad-theta", o.quad_theta, "Gauss-Legendre nodes in cos(theta)")->capture_default_str();
  average->add_option("--quad-phi", o.quad_phi, "uniform nodes in phi")->capture_default_str();
  average->add_flag("--with-oracle", o.with_oracle, "add the closed-form column");
  average->add_option("--fix-asymptote", o.fix_asymptote, "hold the fit asymptote at this value");
  add_output_flags(average, o);

  auto* gcurve = app.add_subcommand("gcurve", "g = max F - min F over theta (cases C, D)");
  add_noise_flags(gcurve, o, true);
  gcurve->add_option("--kappa-tau", o.kappa_tau, "single kappa*tau value");
  gcurve->add_option("--kappa-tau-sweep", o.sweep, "start:stop:n (default 0:3:31)");
  gcurve->add_option("--theta-grid", o.theta_grid, "theta points on [0, pi]")->capture_default_str();
  add_output_flags(gcurve, o);

  auto* channel = app.add_subcommand("channel", "teleport through a given two-qubit resource");
  channel->add_option("--channel", o.channel, "popescu | maximally-mixed | dephased:<4kt> | file:<path>")->required();
  channel->add_option("--theta-grid", o.theta_grid, "theta points on [0, pi]")->capture_default_str();
  channel->add_option("--phi-grid", o.phi_grid, "phi points on [0, 2pi)")->capture_default_str();
  channel->add_option("--dt", o.dt, "RK4 step for dephased channels (0 = automatic)")->capture_default_str();
  add_output_flags(channel, o);

  auto* pulses = app.add_subcommand("pulses", "print a compiled pulse program");
  pulses->add_option("--program", o.program, "cnot | hadamard | bell | correction")->capture_default_str();
  pulses->add_option("--out", o.out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (surface->parsed()) return cmd_surface(ctx, o);
    if (average->parsed()) return cmd_average(ctx, o);
    if (gcurve->parsed()) return cmd_gcurve(ctx, o);
    if (channel->parsed()) return cmd_channel(ctx, o);
    if (pulses->parsed()) return cmd_pulses(ctx, o);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
