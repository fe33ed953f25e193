// Copyright 2026 The qtele Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Three-qubit teleportation with noise placed at one stage of the circuit.
//
// Register: qubit 0 holds the input state, qubit 1 is Alice's half of the
// pair, qubit 2 is Bob's. The Bell measurement is CNOT(0->1) then H(0); the
// corrections are CX(1->2) then CZ(0->2), applied unitarily, after which
// qubits 0 and 1 are traced out.
//
// Noise placements:
//   A  input qubit, for a window of length 1 before the circuit (H = 0)
//   B  both halves of the pair, same window and rate
//   C  qubits 0 and 1 while the compiled Bell-measurement pulses run
//   D  qubit 2 while the compiled correction pulses run
// In every case kappa = kappa_tau / window.

#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "qtele/lindblad.hpp"
#include "qtele/parallel.hpp"
#include "qtele/pulse.hpp"
#include "qtele/quantum.hpp"
#include "qtele/sphere.hpp"

namespace qtele {

enum class CaseTag { A, B, C, D, Custom };

inline char case_name(CaseTag t) {
  switch (t) {
    case CaseTag::A: return 'A';
    case CaseTag::B: return 'B';
    case CaseTag::C: return 'C';
    case CaseTag::D: return 'D';
    case CaseTag::Custom: return '*';
  }
  return '?';
}

struct NoiseCase {
  CaseTag tag = CaseTag::A;
  std::vector<Axis> axes;
  double kappa_tau = 0.0;

  void validate() const {
    if (!(kappa_tau >= 0) || !std::isfinite(kappa_tau)) {
      throw std::invalid_argument("kappa_tau must be finite and >= 0");
    }
    if (axes.empty() && kappa_tau > 0) throw std::invalid_argument("noise case needs at least one axis");
    if (tag == CaseTag::Custom) throw std::invalid_argument("custom channels go through run_custom_channel");
  }

  std::string axes_string() const {
    std::string s;
    for (auto a : axes) s += axis_name(a);
    return s;
  }
};

struct TeleportResult {
  DensityMatrix rho_out;
  double fidelity;
  PureStateAngles input;
};

inline constexpr std::size_t kRegister = 3;
inline constexpr std::size_t kInput = 0;
inline constexpr std::size_t kAlice = 1;
inline constexpr std::size_t kBob = 2;

/// Length of the idle noise window used by cases A and B.
inline constexpr double kIdleWindow = 1.0;

inline Operator bell_measurement_unitary() {
  return hadamard_gate(kInput, kRegister) * cnot_gate(kInput, kAlice, kRegister);
}

inline Operator correction_unitary() {
  return cz_gate(kInput, kBob, kRegister) * cnot_gate(kAlice, kBob, kRegister);
}

inline PulseProgram bell_measurement_program(PulseAmplitudes amp = {}) {
  PulseProgram p = cnot_pulse(kRegister, kInput, kAlice, amp);
  p.then(hadamard_pulse(kRegister, kInput, amp));
  return p;
}

inline PulseProgram correction_program(PulseAmplitudes amp = {}) {
  PulseProgram p = controlled_pauli_pulse(kRegister, kAlice, kBob, Axis::x, amp);
  p.then(controlled_pauli_pulse(kRegister, kInput, kBob, Axis::z, amp));
  return p;
}

namespace detail {

inline DensityMatrix evolve_idle(const DensityMatrix& rho, std::span<const std::size_t> qubits,
                                 const NoiseCase& c, const IntegratorConfig& cfg) {
  if (c.kappa_tau == 0) return rho;
  const double kappa = c.kappa_tau / kIdleWindow;
  const auto schedule = NoiseSchedule::uniform(qubits, c.axes, kappa, 0.0, kIdleWindow);
  return evolve(rho, Operator::zero(kRegister), schedule, 0.0, kIdleWindow, cfg);
}

// Runs `program` with the case's noise on `qubits` for the program's whole
// (grid-aligned) duration tau, with kappa = kappa_tau / tau.
inline DensityMatrix evolve_gated(const DensityMatrix& rho, const PulseProgram& program,
                                  std::span<const std::size_t> qubits, const NoiseCase& c,
                                  const IntegratorConfig& cfg) {
  const double nominal_kappa = c.kappa_tau / program.total_duration();
  IntegratorConfig step_cfg = cfg;
  step_cfg.dt = cfg.dt > 0 ? cfg.dt : default_dt(nominal_kappa, program.max_amplitude());
  const PulseProgram aligned = align_to_grid(program, step_cfg.dt);
  const double tau = aligned.total_duration();
  const auto schedule = NoiseSchedule::uniform(qubits, c.axes, c.kappa_tau / tau, 0.0, tau);
  return evolve_program(rho, aligned, schedule, 0.0, step_cfg);
}

}  // namespace detail

/// Teleports a single-qubit state (pure or mixed) through the noisy circuit; returns Bob's state.
inline DensityMatrix teleport_state(const NoiseCase& c, const DensityMatrix& rho_in, const IntegratorConfig& cfg = {},
                                    PulseAmplitudes amp = {}) {
  c.validate();
  if (rho_in.dim() != 2) throw std::invalid_argument("teleport input must be a single-qubit state");
  DensityMatrix rho = tensor(rho_in, bell_phi_plus());
  const Operator bell = bell_measurement_unitary();
  const Operator corr = correction_unitary();
  switch (c.tag) {
    case CaseTag::A: {
      const std::array<std::size_t, 1> q{kInput};
      rho = detail::evolve_idle(rho, q, c, cfg).evolved_by(corr * bell);
      break;
    }
    case CaseTag::B: {
      const std::array<std::size_t, 2> q{kAlice, kBob};
      rho = detail::evolve_idle(rho, q, c, cfg).evolved_by(corr * bell);
      break;
    }
    case CaseTag::C: {
      const std::array<std::size_t, 2> q{kInput, kAlice};
      rho = detail::evolve_gated(rho, bell_measurement_program(amp), q, c, cfg).evolved_by(corr);
      break;
    }
    case CaseTag::D: {
      const std::array<std::size_t, 1> q{kBob};
      rho = detail::evolve_gated(rho.evolved_by(bell), correction_program(amp), q, c, cfg);
      break;
    }
    case CaseTag::Custom:
      break;
  }
  return partial_trace(rho, {kBob});
}

inline TeleportResult run_case(const NoiseCase& c, PureStateAngles input, const IntegratorConfig& cfg = {},
                               PulseAmplitudes amp = {}) {
  const StateVector psi = state_vector(input);
  DensityMatrix out = teleport_state(c, DensityMatrix::projector(psi), cfg, amp);
  const double f = fidelity_pure(psi, out);
  return {std::move(out), f, input};
}

/// Popescu's mixed pair I/8 + ½|Ψ-><Ψ-|.
inline DensityMatrix popescu_channel() {
  const StateVector psi_minus = bell_basis()[3];
  return DensityMatrix(Operator(Matrix::Identity(4, 4) / 8.0 + 0.5 * psi_minus * psi_minus.adjoint()));
}

/// |Φ+> after σ_z noise on both qubits with total exposure 4κτ = `four_kappa_tau`.
inline DensityMatrix dephased_channel(double four_kappa_tau, const IntegratorConfig& cfg = {}) {
  if (!(four_kappa_tau >= 0)) throw std::invalid_argument("dephasing exposure must be >= 0");
  const std::array<std::size_t, 2> q{0, 1};
  const std::array<Axis, 1> z{Axis::z};
  const auto schedule = NoiseSchedule::uniform(q, z, four_kappa_tau / 4.0, 0.0, 1.0);
  return evolve(bell_phi_plus(), Operator::zero(2), schedule, 0.0, 1.0, cfg);
}

/// Teleports through an arbitrary two-qubit resource with ideal gates.
///
/// Bob finishes with the Pauli that maps |Φ+> onto the channel's dominant Bell
/// component, so a channel close to Ψ- is used as a Ψ- resource rather than as
/// a poor Φ+ one.
inline DensityMatrix teleport_through_channel(const DensityMatrix& channel, const DensityMatrix& rho_in) {
  if (channel.dim() != 4) throw std::invalid_argument("channel must be a two-qubit density matrix");
  if (rho_in.dim() != 2) throw std::invalid_argument("teleport input must be a single-qubit state");
  const DensityMatrix rho = tensor(rho_in, channel).evolved_by(correction_unitary() * bell_measurement_unitary());
  DensityMatrix out = partial_trace(rho, {kBob});
  Matrix frame = Matrix::Identity(2, 2);
  switch (dominant_bell_state(channel)) {
    case 1: frame = pauli_matrix(Axis::z); break;
    case 2: frame = pauli_matrix(Axis::x); break;
    case 3: frame = pauli_matrix(Axis::x) * pauli_matrix(Axis::z); break;
    default: break;
  }
  return out.evolved_by(Operator(frame));
}

inline TeleportResult run_custom_channel(const DensityMatrix& channel, PureStateAngles input) {
  // Re-validate: callers may hand over unchecked matrices.
  const DensityMatrix checked(channel.op());
  const StateVector psi = state_vector(input);
  DensityMatrix out = teleport_through_channel(checked, DensityMatrix::projector(psi));
  const double f = fidelity_pure(psi, out);
  return {std::move(out), f, input};
}

/// Affine map from input Bloch vector to Bob's output, ρ_out(r) = M0 + Σ r_a M_a.
///
/// The whole pipeline is linear in the input density matrix, so four probe
/// runs determine it exactly; surfaces and sphere averages then cost one 2x2
/// evaluation per point instead of one integration.
class TeleportMap {
 public:
  template <typename Pipeline>
  static TeleportMap from_pipeline(Pipeline&& run) {
    const DensityMatrix up = run(pure_state({0.0, 0.0}));            // r = +z
    const DensityMatrix down = run(pure_state({kPi, 0.0}));          // r = -z
    const DensityMatrix plus_x = run(pure_state({kPi / 2, 0.0}));    // r = +x
    const DensityMatrix minus_y = run(pure_state({kPi / 2, kPi / 2}));  // r = -y
    TeleportMap m;
    m.m0_ = 0.5 * (up.matrix() + down.matrix());
    m.mz_ = 0.5 * (up.matrix() - down.matrix());
    m.mx_ = plus_x.matrix() - m.m0_;
    m.my_ = m.m0_ - minus_y.matrix();
    return m;
  }

  DensityMatrix output(const BlochVector& r) const {
    return DensityMatrix::unchecked(Operator(m0_ + r.rx * mx_ + r.ry * my_ + r.rz * mz_));
  }

  TeleportResult apply(PureStateAngles input) const {
    const StateVector psi = state_vector(input);
    DensityMatrix out = output(bloch_vector(DensityMatrix::projector(psi)));
    const double f = fidelity_pure(psi, out);
    return {std::move(out), f, input};
  }

  double fidelity(PureStateAngles input) const { return apply(input).fidelity; }

 private:
  Matrix m0_, mx_, my_, mz_;
};

inline TeleportMap case_map(const NoiseCase& c, const IntegratorConfig& cfg = {}, PulseAmplitudes amp = {}) {
  c.validate();
  return TeleportMap::from_pipeline([&](const DensityMatrix& in) { return teleport_state(c, in, cfg, amp); });
}

inline TeleportMap channel_map(const DensityMatrix& channel) {
  const DensityMatrix checked(channel.op());
  return TeleportMap::from_pipeline([&](const DensityMatrix& in) { return teleport_through_channel(checked, in); });
}

/// `n` evenly spaced points on [lo, hi], endpoints included.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) throw std::invalid_argument("linspace: n must be >= 1");
  std::vector<double> v(n, lo);
  for (std::size_t i = 1; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  if (n > 1) v.back() = hi;
  return v;
}

/// θ grid on [0, π], endpoints included.
inline std::vector<double> theta_grid(std::size_t n = 41) { return linspace(0.0, kPi, n); }

/// φ grid on [0, 2π), right endpoint excluded.
inline std::vector<double> phi_grid(std::size_t n = 41) {
  if (n == 0) throw std::invalid_argument("phi_grid: n must be >= 1");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
  return v;
}

/// Values on a θ x φ grid, stored θ-outer.
struct Surface {
  std::vector<double> thetas;
  std::vector<double> phis;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * phis.size() + j]; }
  double max() const { return *std::max_element(values.begin(), values.end()); }
  double min() const { return *std::min_element(values.begin(), values.end()); }
};

inline Surface fidelity_surface(const TeleportMap& map, std::vector<double> thetas, std::vector<double> phis) {
  if (thetas.empty() || phis.empty()) throw std::invalid_argument("fidelity_surface: empty grid");
  Surface s{std::move(thetas), std::move(phis), {}};
  s.values.reserve(s.thetas.size() * s.phis.size());
  for (double t : s.thetas) {
    for (double p : s.phis) s.values.push_back(map.fidelity({t, p}));
  }
  return s;
}

inline Surface fidelity_surface(const NoiseCase& c, std::vector<double> thetas, std::vector<double> phis,
                                const IntegratorConfig& cfg = {}, PulseAmplitudes amp = {}) {
  return fidelity_surface(case_map(c, cfg, amp), std::move(thetas), std::move(phis));
}

/// Mask (θ-outer, like Surface::values) of grid points with F >= level.
inline std::vector<bool> fidelity_range_contour(const Surface& s, double level) {
  std::vector<bool> mask(s.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i) mask[i] = s.values[i] >= level;
  return mask;
}

inline double average_fidelity(const TeleportMap& map, const QuadratureSpec& quad = {}) {
  return average_over_sphere([&](double t, double p) { return map.fidelity({t, p}); }, quad);
}

inline double average_fidelity(const NoiseCase& c, const QuadratureSpec& quad = {}, const IntegratorConfig& cfg = {},
                               PulseAmplitudes amp = {}) {
  return average_fidelity(case_map(c, cfg, amp), quad);
}

struct AveragePoint {
  double kappa_tau;
  double f_avg;
};

/// F_av at each kappa_tau of `grid` with the case's axes, sweep points run in parallel.
inline std::vector<AveragePoint> average_sweep(CaseTag tag, const std::vector<Axis>& axes,
                                               const std::vector<double>& grid, const QuadratureSpec& quad = {},
                                               const IntegratorConfig& cfg = {}, PulseAmplitudes amp = {}) {
  return parallel_map(grid.size(), [&](std::size_t i) {
    const NoiseCase c{tag, axes, grid[i]};
    return AveragePoint{grid[i], average_fidelity(c, quad, cfg, amp)};
  });
}

struct GPoint {
  double kappa_tau;
  double g;
};

/// g(κτ) = max_θ F - min_θ F at φ = 0 for the gate-noise cases C and D.
inline std::vector<GPoint> g_statistic(CaseTag tag, const std::vector<Axis>& axes, const std::vector<double>& grid,
                                       const IntegratorConfig& cfg = {}, std::size_t n_theta = 41,
                                       PulseAmplitudes amp = {}) {
  if (tag != CaseTag::C && tag != CaseTag::D) throw std::invalid_argument("g_statistic applies to cases C and D");
  const std::vector<double> thetas = theta_grid(n_theta);
  return parallel_map(grid.size(), [&](std::size_t i) {
    const Surface s = fidelity_surface(NoiseCase{tag, axes, grid[i]}, thetas, {0.0}, cfg, amp);
    return GPoint{grid[i], s.max() - s.min()};
  });
}

}  // namespace qtele
