// Copyright 2026 The qtele Authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment plumbing shared by the command-line tool and its tests: flag
// parsing, CSV/JSON serialization, run manifests and channel loading.
// Requires nlohmann/json (vendored as <json.hpp>).

#pragma once

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unistd.h>
#include <vector>

#include "qtele/oracles.hpp"
#include "qtele/teleport.hpp"

#ifndef QTELE_VERSION
#define QTELE_VERSION "0.0.0"
#endif

namespace qtele::experiment {

using nlohmann::json;

inline constexpr const char* kVersion = QTELE_VERSION;

/// Bad flag values or unreadable inputs; the CLI maps this to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fixed 12-significant-digit rendering used in every data file.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline CaseTag parse_case(std::string_view s) {
  if (s.size() == 1) {
    switch (s[0]) {
      case 'A': case 'a': return CaseTag::A;
      case 'B': case 'b': return CaseTag::B;
      case 'C': case 'c': return CaseTag::C;
      case 'D': case 'd': return CaseTag::D;
      default: break;
    }
  }
  throw UsageError("case must be one of A, B, C, D (got '" + std::string(s) + "')");
}

/// "x", "z", "xyz", ...: each axis at most once.
inline std::vector<Axis> parse_axes(std::string_view s) {
  if (s.empty()) throw UsageError("axes must not be empty");
  std::vector<Axis> axes;
  for (char c : s) {
    Axis a;
    try {
      a = parse_axis(c);
    } catch (const std::exception&) {
      throw UsageError("axes must be drawn from x, y, z (got '" + std::string(s) + "')");
    }
    if (std::find(axes.begin(), axes.end(), a) != axes.end()) throw UsageError("repeated axis in '" + std::string(s) + "'");
    axes.push_back(a);
  }
  return axes;
}

inline std::string axes_string(const std::vector<Axis>& axes) {
  std::string s;
  for (Axis a : axes) s += axis_name(a);
  return s;
}

namespace detail {

inline double parse_double(std::string_view s, const char* what) {
  const std::string str(s);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != str.size() || str.empty() || !std::isfinite(v)) {
    throw UsageError(std::string("invalid ") + what + ": '" + str + "'");
  }
  return v;
}

}  // namespace detail

/// "start:stop:n" -> n evenly spaced values, endpoints included.
inline std::vector<double> parse_sweep(std::string_view spec) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string_view::npos || spec.find(':', c2 + 1) != std::string_view::npos) {
    throw UsageError("sweep must look like start:stop:n (got '" + std::string(spec) + "')");
  }
  const double lo = detail::parse_double(spec.substr(0, c1), "sweep start");
  const double hi = detail::parse_double(spec.substr(c1 + 1, c2 - c1 - 1), "sweep stop");
  const double n = detail::parse_double(spec.substr(c2 + 1), "sweep count");
  if (n < 1 || n != std::floor(n) || n > 1e6) throw UsageError("sweep count must be a positive integer");
  if (n > 1 && !(hi > lo)) throw UsageError("sweep stop must exceed start");
  if (lo < 0) throw UsageError("kappa_tau must be >= 0");
  return linspace(lo, hi, static_cast<std::size_t>(n));
}

/// Closed-form average for (case, axes) when one exists.
inline std::optional<oracle::Tag> oracle_tag(CaseTag tag, const std::vector<Axis>& axes) {
  if (tag == CaseTag::C || tag == CaseTag::D) return oracle::Tag::CDfit;
  if (tag != CaseTag::A && tag != CaseTag::B) return std::nullopt;
  const bool a = tag == CaseTag::A;
  if (axes.size() == 3) return a ? oracle::Tag::A2iso : oracle::Tag::B2iso;
  if (axes.size() == 1 && axes[0] == Axis::z) return a ? oracle::Tag::A1z : oracle::Tag::B1z;
  if (axes.size() == 1 && axes[0] == Axis::x) return a ? oracle::Tag::A1x : oracle::Tag::B1x;
  return std::nullopt;
}

enum class Format { csv, json };

inline Format parse_format(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw UsageError("format must be csv or json");
}

// ---------------------------------------------------------------- surfaces

inline std::string surface_csv(const Surface& s) {
  std::string out = "theta,phi,fidelity\n";
  for (std::size_t i = 0; i < s.thetas.size(); ++i) {
    for (std::size_t j = 0; j < s.phis.size(); ++j) {
      out += fmt(s.thetas[i]) + ',' + fmt(s.phis[j]) + ',' + fmt(s.at(i, j)) + '\n';
    }
  }
  return out;
}

inline json surface_json(const Surface& s, const NoiseCase& c) {
  return {{"case", std::string(1, case_name(c.tag))},
          {"axes", axes_string(c.axes)},
          {"kappa_tau", c.kappa_tau},
          {"theta", s.thetas},
          {"phi", s.phis},
          {"fidelity", s.values},
          {"layout", "theta-outer"}};
}

// ----------------------------------------------------------- average sweeps

struct AverageRow {
  double kappa_tau;
  double f_avg;
  std::optional<double> oracle;
};

inline std::vector<AverageRow> average_rows(const std::vector<AveragePoint>& pts, std::optional<oracle::Tag> tag) {
  std::vector<AverageRow> rows;
  for (const auto& p : pts) {
    std::optional<double> o;
    if (tag) o = oracle::favg({*tag, p.kappa_tau});
    rows.push_back({p.kappa_tau, p.f_avg, o});
  }
  return rows;
}

inline std::string average_csv(const std::vector<AverageRow>& rows) {
  const bool with_oracle = !rows.empty() && rows.front().oracle.has_value();
  std::string out = with_oracle ? "kappa_tau,f_avg_numeric,f_avg_oracle\n" : "kappa_tau,f_avg_numeric\n";
  for (const auto& r : rows) {
    out += fmt(r.kappa_tau) + ',' + fmt(r.f_avg);
    if (with_oracle) out += ',' + fmt(*r.oracle);
    out += '\n';
  }
  return out;
}

inline json average_json(const std::vector<AverageRow>& rows, const NoiseCase& c) {
  json pts = json::array();
  for (const auto& r : rows) {
    json p{{"kappa_tau", r.kappa_tau}, {"f_avg_numeric", r.f_avg}};
    if (r.oracle) p["f_avg_oracle"] = *r.oracle;
    pts.push_back(std::move(p));
  }
  return {{"case", std::string(1, case_name(c.tag))}, {"axes", axes_string(c.axes)}, {"points", std::move(pts)}};
}

/// Points as they appear in the data file (values rounded to the printed digits).
inline std::vector<DecayPoint> as_printed(const std::vector<AverageRow>& rows) {
  std::vector<DecayPoint> pts;
  for (const auto& r : rows) pts.push_back({std::stod(fmt(r.kappa_tau)), std::stod(fmt(r.f_avg))});
  return pts;
}

/// Reads the first two columns of an average-sweep CSV.
inline std::vector<DecayPoint> read_average_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("kappa_tau,f_avg_numeric", 0) != 0) {
    throw UsageError("not an average-sweep CSV (bad header)");
  }
  std::vector<DecayPoint> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    if (c1 == std::string::npos) throw UsageError("malformed CSV row: " + line);
    const auto c2 = line.find(',', c1 + 1);
    pts.push_back({detail::parse_double(std::string_view(line).substr(0, c1), "kappa_tau"),
                   detail::parse_double(std::string_view(line).substr(c1 + 1, c2 == std::string::npos ? c2 : c2 - c1 - 1),
                                        "f_avg")});
  }
  return pts;
}

inline json fit_json(const DecayFit& f, std::size_t n_points) {
  return {{"model", "a + b*exp(-c*kappa_tau)"},
          {"asymptote", f.asymptote},
          {"amplitude", f.amplitude},
          {"rate", f.rate},
          {"residual_rms", f.residual_rms},
          {"iterations", f.iterations},
          {"asymptote_fixed", f.asymptote_fixed},
          {"points", n_points}};
}

// ------------------------------------------------------------------ g curve

inline std::string gcurve_csv(const std::vector<GPoint>& pts) {
  std::string out = "kappa_tau,g\n";
  for (const auto& p : pts) out += fmt(p.kappa_tau) + ',' + fmt(p.g) + '\n';
  return out;
}

inline json gcurve_json(const std::vector<GPoint>& pts, const NoiseCase& c) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back({{"kappa_tau", p.kappa_tau}, {"g", p.g}});
  return {{"case", std::string(1, case_name(c.tag))}, {"axes", axes_string(c.axes)}, {"points", std::move(arr)}};
}

// ----------------------------------------------------------------- channels

/// Four lines of four `re,im` entries. Blank lines and '#' comments are skipped.
inline DensityMatrix parse_channel_text(std::istream& in) {
  Matrix m(4, 4);
  int row = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string t; ls >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    if (row >= 4) throw UsageError("channel file has more than 4 rows");
    if (tokens.size() != 4) throw UsageError("channel row " + std::to_string(row + 1) + " needs 4 entries");
    for (int col = 0; col < 4; ++col) {
      const std::string& t = tokens[static_cast<std::size_t>(col)];
      const auto comma = t.find(',');
      if (comma == std::string::npos) throw UsageError("channel entry '" + t + "' is not re,im");
      const double re = detail::parse_double(std::string_view(t).substr(0, comma), "channel entry");
      const double im = detail::parse_double(std::string_view(t).substr(comma + 1), "channel entry");
      m(row, col) = Complex(re, im);
    }
    ++row;
  }
  if (row != 4) throw UsageError("channel file needs 4 rows, found " + std::to_string(row));
  const std::string why = DensityMatrix::violation(Operator(m));
  if (!why.empty()) throw UsageError("channel is not a valid density matrix: " + why);
  return DensityMatrix(Operator(m));
}

inline DensityMatrix load_channel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read channel file '" + path + "'");
  return parse_channel_text(in);
}

/// popescu | maximally-mixed | dephased:<4κτ> | file:<path>
inline DensityMatrix parse_channel(std::string_view spec, const IntegratorConfig& cfg = {}) {
  if (spec == "popescu") return popescu_channel();
  if (spec == "maximally-mixed") return DensityMatrix::maximally_mixed(2);
  if (spec.rfind("dephased:", 0) == 0) {
    const double s = detail::parse_double(spec.substr(9), "dephasing exposure");
    if (s < 0) throw UsageError("dephasing exposure must be >= 0");
    return dephased_channel(s, cfg);
  }
  if (spec.rfind("file:", 0) == 0) return load_channel_file(std::string(spec.substr(5)));
  throw UsageError("unknown channel '" + std::string(spec) + "'");
}

inline const char* bell_state_name(std::size_t k) {
  static const char* names[] = {"phi+", "phi-", "psi+", "psi-"};
  return k < 4 ? names[k] : "?";
}

inline json channel_report(const DensityMatrix& channel, std::string_view name, const std::vector<double>& thetas,
                           const std::vector<double>& phis, const QuadratureSpec& quad = {}) {
  const TeleportMap map = channel_map(channel);
  json samples = json::array();
  for (double t : thetas) {
    for (double p : phis) samples.push_back({{"theta", t}, {"phi", p}, {"fidelity", map.fidelity({t, p})}});
  }
  const double fab = std::clamp(singlet_fraction(channel), 0.0, 1.0);
  return {{"channel", std::string(name)},
          {"samples", std::move(samples)},
          {"f_avg", average_fidelity(map, quad)},
          {"singlet_fraction", fab},
          {"dominant_bell_state", bell_state_name(dominant_bell_state(channel))},
          {"horodecki_optimal", oracle::horodecki_optimal(fab)}};
}

// ---------------------------------------------------------------- manifests

struct RunManifest {
  std::string id;
  std::string command;
  std::string subcommand;
  std::optional<NoiseCase> noise;
  std::vector<double> kappa_tau;
  std::size_t theta_points = 0;
  std::size_t phi_points = 0;
  IntegratorConfig integrator;
  std::optional<QuadratureSpec> quadrature;
  std::string output;
  std::string started_at;
  double wall_clock_seconds = 0;
  std::size_t workers = 1;
  json extra = json::object();

  json to_json() const {
    json j{{"id", id},
           {"command", command},
           {"subcommand", subcommand},
           {"version", kVersion},
           {"output", output},
           {"started_at", started_at},
           {"wall_clock_seconds", wall_clock_seconds},
           {"workers", workers}};
    if (noise) {
      j["case"] = {{"tag", std::string(1, case_name(noise->tag))}, {"axes", axes_string(noise->axes)}};
    }
    if (!kappa_tau.empty()) j["kappa_tau"] = kappa_tau;
    j["grids"] = {{"theta", theta_points}, {"phi", phi_points}};
    j["integrator"] = {{"method", "rk4"},
                       {"dt", integrator.dt > 0 ? json(integrator.dt) : json("auto")},
                       {"tol_trace_drift", integrator.tol_trace_drift}};
    if (quadrature) j["quadrature"] = {{"n_theta", quadrature->n_theta}, {"n_phi", quadrature->n_phi}};
    if (!extra.empty()) j["extra"] = extra;
    return j;
  }
};

/// UTC timestamp plus pid and a process-local counter.
inline std::string new_run_id(std::chrono::system_clock::time_point now = std::chrono::system_clock::now()) {
  static int counter = 0;
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(now.time_since_epoch()).count() % 1000000000;
  char id[128];
  std::snprintf(id, sizeof id, "%s-%09lld-%d-%d", buf, static_cast<long long>(ns), static_cast<int>(getpid()),
                counter++);
  return id;
}

inline std::string iso_utc(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string manifest_path(const std::string& out) { return out + ".manifest.json"; }
inline std::string fit_path(const std::string& out) { return out + ".fit.json"; }

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace qtele::experiment
