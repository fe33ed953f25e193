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

// Piecewise-constant control schedules for the qubit Hamiltonian
//
//   H(t) = -1/2 sum_i B_i(t) . sigma_i - sum_{i != j} J_ij(t) sigma+_i sigma-_j
//
// and the gates built from them. A coupling J on pair (a, b) contributes both
// orderings, -J (sigma+_a sigma-_b + sigma-_a sigma+_b).

#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "qtele/lindblad.hpp"
#include "qtele/quantum.hpp"

namespace qtele {

/// Field amplitudes used when compiling gates. Gate times follow as angle / amplitude.
struct PulseAmplitudes {
  double b_ref = 1.0;
  double j_ref = 1.0;
};

struct Coupling {
  std::size_t q1 = 0;
  std::size_t q2 = 1;
  double j = 0.0;
};

struct PulseSegment {
  double duration = 0.0;
  std::vector<std::array<double, 3>> b_fields;  // per qubit (B_x, B_y, B_z)
  std::vector<Coupling> couplings;

  double max_amplitude() const {
    double w = 0.0;
    for (const auto& b : b_fields) {
      for (double v : b) w = std::max(w, std::abs(v));
    }
    for (const auto& c : couplings) w = std::max(w, std::abs(c.j));
    return w;
  }
};

class PulseProgram {
 public:
  explicit PulseProgram(std::size_t n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits == 0) throw std::invalid_argument("PulseProgram needs at least one qubit");
  }

  std::size_t num_qubits() const { return n_qubits_; }
  const std::vector<PulseSegment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }

  /// Global phase carried for bookkeeping; ideal_unitary multiplies by e^{i phase}.
  double global_phase() const { return global_phase_; }
  void add_global_phase(double p) { global_phase_ += p; }

  double total_duration() const {
    double t = 0.0;
    for (const auto& s : segments_) t += s.duration;
    return t;
  }

  double max_amplitude() const {
    double w = 0.0;
    for (const auto& s : segments_) w = std::max(w, s.max_amplitude());
    return w;
  }

  /// Blank segment sized for this register.
  PulseSegment make_segment(double duration) const {
    if (!(duration >= 0)) throw std::invalid_argument("pulse segment duration must be >= 0");
    PulseSegment s;
    s.duration = duration;
    s.b_fields.assign(n_qubits_, {0.0, 0.0, 0.0});
    return s;
  }

  void push(PulseSegment s) {
    if (!(s.duration >= 0)) throw std::invalid_argument("pulse segment duration must be >= 0");
    if (s.b_fields.size() != n_qubits_) throw std::invalid_argument("segment field count != register size");
    for (const auto& c : s.couplings) {
      if (c.q1 >= n_qubits_ || c.q2 >= n_qubits_ || c.q1 == c.q2) {
        throw std::invalid_argument("invalid coupling pair in pulse segment");
      }
    }
    segments_.push_back(std::move(s));
  }

  /// Appends `later`, which then runs after this program's segments.
  PulseProgram& then(const PulseProgram& later) {
    if (later.n_qubits_ != n_qubits_) throw std::invalid_argument("cannot concatenate programs of different sizes");
    segments_.insert(segments_.end(), later.segments_.begin(), later.segments_.end());
    global_phase_ += later.global_phase_;
    return *this;
  }

 private:
  std::size_t n_qubits_;
  std::vector<PulseSegment> segments_;
  double global_phase_ = 0.0;
};

inline Operator segment_hamiltonian(const PulseSegment& seg, std::size_t n_qubits) {
  Operator h = Operator::zero(n_qubits);
  for (std::size_t q = 0; q < seg.b_fields.size(); ++q) {
    const auto& b = seg.b_fields[q];
    if (b[0] != 0) h += pauli(Axis::x, q, n_qubits) * Complex(-0.5 * b[0]);
    if (b[1] != 0) h += pauli(Axis::y, q, n_qubits) * Complex(-0.5 * b[1]);
    if (b[2] != 0) h += pauli(Axis::z, q, n_qubits) * Complex(-0.5 * b[2]);
  }
  Matrix raise(2, 2), lower(2, 2);
  raise << 0, 1, 0, 0;
  lower << 0, 0, 1, 0;
  for (const auto& c : seg.couplings) {
    if (c.j == 0) continue;
    const Operator exchange = embed(raise, c.q1, n_qubits) * embed(lower, c.q2, n_qubits) +
                              embed(lower, c.q1, n_qubits) * embed(raise, c.q2, n_qubits);
    h -= exchange * Complex(c.j);
  }
  return h;
}

/// exp(-i h t) for Hermitian h.
inline Operator hermitian_propagator(const Operator& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
  return Operator(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
}

/// Noise-free unitary of a program: e^{i phase} times the ordered product of segment propagators.
inline Operator ideal_unitary(const PulseProgram& program) {
  const std::size_t n = program.num_qubits();
  Operator u = Operator::identity(n);
  for (const auto& seg : program.segments()) {
    if (seg.duration == 0) continue;
    u = hermitian_propagator(segment_hamiltonian(seg, n), seg.duration) * u;
  }
  return u * std::polar(1.0, program.global_phase());
}

namespace detail {

inline PulseProgram rotation_pulse(std::size_t n, std::size_t qubit, int component, double angle, double b_ref) {
  if (qubit >= n) throw std::out_of_range("rotation qubit out of range");
  if (!(b_ref > 0)) throw std::invalid_argument("b_ref must be positive");
  PulseProgram p(n);
  if (angle == 0) return p;
  PulseSegment s = p.make_segment(std::abs(angle) / b_ref);
  s.b_fields[qubit][component] = angle > 0 ? b_ref : -b_ref;
  p.push(std::move(s));
  return p;
}

}  // namespace detail

/// R_x(angle) = e^{i sigma_x angle / 2} on `qubit` via a B_x pulse.
inline PulseProgram rx_pulse(std::size_t n_qubits, std::size_t qubit, double angle, PulseAmplitudes amp = {}) {
  return detail::rotation_pulse(n_qubits, qubit, 0, angle, amp.b_ref);
}

/// R_y(angle) = e^{i sigma_y angle / 2} on `qubit` via a B_y pulse.
inline PulseProgram ry_pulse(std::size_t n_qubits, std::size_t qubit, double angle, PulseAmplitudes amp = {}) {
  return detail::rotation_pulse(n_qubits, qubit, 1, angle, amp.b_ref);
}

/// R_y(pi/2) R_x(pi) = iH; the recorded -pi/2 phase makes ideal_unitary exactly H.
inline PulseProgram hadamard_pulse(std::size_t n_qubits, std::size_t qubit, PulseAmplitudes amp = {}) {
  PulseProgram p = rx_pulse(n_qubits, qubit, kPi, amp);
  p.then(ry_pulse(n_qubits, qubit, kPi / 2, amp));
  p.add_global_phase(-kPi / 2);
  return p;
}

/// U(theta) = exp(-i theta (sigma+ sigma- + sigma- sigma+)) on (q1, q2).
///
/// Realized as a coupling pulse J = -j_ref for theta / j_ref; this sign is the
/// one under which the CNOT sequence in cnot_pulse closes exactly.
inline PulseProgram xy_coupling_pulse(std::size_t n_qubits, std::size_t q1, std::size_t q2, double theta,
                                      PulseAmplitudes amp = {}) {
  if (q1 >= n_qubits || q2 >= n_qubits) throw std::out_of_range("coupling qubit out of range");
  if (q1 == q2) throw std::invalid_argument("xy_coupling_pulse: q1 == q2");
  if (!(theta >= 0)) throw std::invalid_argument("xy_coupling_pulse: theta must be >= 0");
  if (!(amp.j_ref > 0)) throw std::invalid_argument("j_ref must be positive");
  PulseProgram p(n_qubits);
  if (theta == 0) return p;
  PulseSegment s = p.make_segment(theta / amp.j_ref);
  s.couplings.push_back({q1, q2, -amp.j_ref});
  p.push(std::move(s));
  return p;
}

/// CNOT = e^{-i pi/4} H_c R_tx(pi/2) R_cx(-pi/2) U(pi/4) R_cx(pi) U(pi/4) H_c, rightmost first.
inline PulseProgram cnot_pulse(std::size_t n_qubits, std::size_t control, std::size_t target,
                               PulseAmplitudes amp = {}) {
  if (control >= n_qubits || target >= n_qubits) throw std::out_of_range("cnot_pulse: qubit out of range");
  if (control == target) throw std::invalid_argument("cnot_pulse: control == target");
  PulseProgram p = hadamard_pulse(n_qubits, control, amp);
  p.then(xy_coupling_pulse(n_qubits, control, target, kPi / 4, amp))
      .then(rx_pulse(n_qubits, control, kPi, amp))
      .then(xy_coupling_pulse(n_qubits, control, target, kPi / 4, amp))
      .then(rx_pulse(n_qubits, control, -kPi / 2, amp))
      .then(rx_pulse(n_qubits, target, kPi / 2, amp))
      .then(hadamard_pulse(n_qubits, control, amp));
  p.add_global_phase(-kPi / 4);
  return p;
}

/// Controlled-X is cnot_pulse; controlled-Z is CNOT conjugated by target Hadamards.
inline PulseProgram controlled_pauli_pulse(std::size_t n_qubits, std::size_t control, std::size_t target, Axis axis,
                                           PulseAmplitudes amp = {}) {
  switch (axis) {
    case Axis::x:
      return cnot_pulse(n_qubits, control, target, amp);
    case Axis::z: {
      PulseProgram p = hadamard_pulse(n_qubits, target, amp);
      p.then(cnot_pulse(n_qubits, control, target, amp)).then(hadamard_pulse(n_qubits, target, amp));
      return p;
    }
    case Axis::y:
      break;
  }
  throw std::invalid_argument("controlled_pauli_pulse supports axes x and z only");
}

/// Copy of `program` whose segment durations are whole multiples of dt.
///
/// Each duration is rounded up to the next step and its amplitudes scaled down
/// so the rotation angle (amplitude x duration) is unchanged.
inline PulseProgram align_to_grid(const PulseProgram& program, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("align_to_grid: dt must be positive");
  PulseProgram out(program.num_qubits());
  out.add_global_phase(program.global_phase());
  for (PulseSegment seg : program.segments()) {
    if (seg.duration > 0) {
      const double steps = std::ceil(seg.duration / dt - 1e-9);
      const double aligned = steps * dt;
      const double scale = seg.duration / aligned;
      for (auto& b : seg.b_fields) {
        for (double& v : b) v *= scale;
      }
      for (auto& c : seg.couplings) c.j *= scale;
      seg.duration = aligned;
    }
    out.push(std::move(seg));
  }
  return out;
}

/// Step size used for a program under `schedule` when cfg.dt is unset.
inline double resolve_dt(const PulseProgram& program, const NoiseSchedule& schedule, const IntegratorConfig& cfg) {
  return cfg.dt > 0 ? cfg.dt : default_dt(schedule.kappa_max(), program.max_amplitude());
}

/// Evolves rho through `program` starting at t0, integrating each segment with
/// a whole number of steps. Noise windows in `schedule` use the same clock.
inline DensityMatrix evolve_program(const DensityMatrix& rho0, const PulseProgram& program,
                                    const NoiseSchedule& schedule, double t0, const IntegratorConfig& cfg = {}) {
  if (program.num_qubits() != rho0.num_qubits()) throw std::invalid_argument("program/state size mismatch");
  IntegratorConfig step_cfg = cfg;
  step_cfg.dt = resolve_dt(program, schedule, cfg);
  const PulseProgram aligned = align_to_grid(program, step_cfg.dt);
  DensityMatrix rho = rho0;
  double t = t0;
  for (const auto& seg : aligned.segments()) {
    if (seg.duration == 0) continue;
    rho = evolve(rho, segment_hamiltonian(seg, program.num_qubits()), schedule, t, t + seg.duration, step_cfg);
    t += seg.duration;
  }
  return rho;
}

/// One line per segment: duration, then nonzero controls as name=value
/// (B<q><axis> with 1-based qubits, J<q1><q2>), tab separated.
inline std::string dump_program(const PulseProgram& program) {
  const auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  std::ostringstream os;
  for (const auto& seg : program.segments()) {
    os << num(seg.duration);
    for (std::size_t q = 0; q < seg.b_fields.size(); ++q) {
      for (int a = 0; a < 3; ++a) {
        if (seg.b_fields[q][a] != 0) os << "\tB" << (q + 1) << "xyz"[a] << '=' << num(seg.b_fields[q][a]);
      }
    }
    for (const auto& c : seg.couplings) {
      if (c.j != 0) os << "\tJ" << (c.q1 + 1) << (c.q2 + 1) << '=' << num(c.j);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace qtele
