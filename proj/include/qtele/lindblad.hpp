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

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qtele/quantum.hpp"

namespace qtele {

/// Lindblad operator sqrt(kappa) sigma_axis on one qubit, switched on for t in [t_on, t_off].
struct NoiseTerm {
  std::size_t qubit = 0;
  Axis axis = Axis::z;
  double kappa = 0.0;
  double t_on = 0.0;
  double t_off = std::numeric_limits<double>::infinity();

  bool active_at(double t) const { return t >= t_on && t <= t_off; }

  void validate() const {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
      throw std::invalid_argument("noise rate must be finite and >= 0, got " + std::to_string(kappa));
    }
    if (!(t_on <= t_off)) throw std::invalid_argument("noise window has t_on > t_off");
  }
};

struct NoiseSchedule {
  std::vector<NoiseTerm> terms;

  void validate(std::size_t n_qubits) const {
    for (const auto& t : terms) {
      t.validate();
      if (t.qubit >= n_qubits) {
        throw std::out_of_range("noise term on qubit " + std::to_string(t.qubit) + " outside the " +
                                std::to_string(n_qubits) + "-qubit register");
      }
    }
  }

  double kappa_max() const {
    double k = 0.0;
    for (const auto& t : terms) k = std::max(k, t.kappa);
    return k;
  }

  /// Same-rate terms for every (qubit, axis) pair over one window.
  static NoiseSchedule uniform(std::span<const std::size_t> qubits, std::span<const Axis> axes, double kappa,
                               double t_on, double t_off) {
    NoiseSchedule s;
    for (auto q : qubits) {
      for (auto a : axes) s.terms.push_back({q, a, kappa, t_on, t_off});
    }
    return s;
  }
};

struct IntegratorConfig {
  enum class Method { rk4 };

  /// Step size; values <= 0 select default_dt() from the problem's rates.
  double dt = 0.0;
  Method method = Method::rk4;
  double tol_trace_drift = 1e-8;
};

/// min(1e-3/kappa_max, 1e-3/omega_max), falling back to 1e-3 when both vanish.
inline double default_dt(double kappa_max, double omega_max) {
  double dt = std::numeric_limits<double>::infinity();
  if (kappa_max > 0) dt = std::min(dt, 1e-3 / kappa_max);
  if (omega_max > 0) dt = std::min(dt, 1e-3 / omega_max);
  return std::isfinite(dt) ? dt : 1e-3;
}

namespace detail {

struct ActiveTerm {
  std::size_t mask;
  Axis axis;
  double kappa;
};

inline void collect_active(const NoiseSchedule& s, std::size_t n_qubits, double t, std::vector<ActiveTerm>& out) {
  out.clear();
  for (const auto& term : s.terms) {
    if (term.kappa > 0 && term.active_at(t)) {
      out.push_back({std::size_t{1} << (n_qubits - 1 - term.qubit), term.axis, term.kappa});
    }
  }
}

// out = -i[h, rho] + sum kappa (sigma rho sigma - rho). `h` may be null for h = 0.
// Pauli sandwiches are index permutations with signs: sigma_x swaps the masked
// bit, sigma_z multiplies by s(r)s(c), sigma_y does both.
inline void lindblad_rhs_into(const Matrix& rho, const Matrix* h, std::span<const ActiveTerm> terms, Matrix& out) {
  const Eigen::Index d = rho.rows();
  const Complex* p = rho.data();
  Complex* o = out.data();
  if (h != nullptr) {
    const Complex* hp = h->data();
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Eigen::Index r = 0; r < d; ++r) {
        Complex acc = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) acc += hp[r + k * d] * p[k + c * d] - p[r + k * d] * hp[k + c * d];
        o[r + c * d] = Complex(acc.imag(), -acc.real());
      }
    }
  } else {
    std::fill(o, o + d * d, Complex(0.0));
  }
  for (const auto& t : terms) {
    const auto m = static_cast<Eigen::Index>(t.mask);
    for (Eigen::Index c = 0; c < d; ++c) {
      const bool cb = (c & m) != 0;
      for (Eigen::Index r = 0; r < d; ++r) {
        const bool rb = (r & m) != 0;
        const double sign = (rb == cb) ? 1.0 : -1.0;
        Complex sandwich;
        switch (t.axis) {
          case Axis::x: sandwich = p[(r ^ m) + (c ^ m) * d]; break;
          case Axis::y: sandwich = sign * p[(r ^ m) + (c ^ m) * d]; break;
          case Axis::z: sandwich = sign * p[r + c * d]; break;
        }
        o[r + c * d] += t.kappa * (sandwich - p[r + c * d]);
      }
    }
  }
}

inline bool is_zero(const Matrix& m) { return m.cwiseAbs().maxCoeff() == 0.0; }

}  // namespace detail

/// dρ/dt for Hamiltonian `h` and the given Pauli noise terms (ħ = 1).
inline Operator lindblad_rhs(const DensityMatrix& rho, const Operator& h, std::span<const NoiseTerm> active_terms) {
  rho.op().check_same_dim(h);
  const std::size_t n = rho.num_qubits();
  std::vector<detail::ActiveTerm> terms;
  for (const auto& t : active_terms) {
    t.validate();
    if (t.qubit >= n) throw std::out_of_range("noise term qubit out of range");
    terms.push_back({std::size_t{1} << (n - 1 - t.qubit), t.axis, t.kappa});
  }
  Matrix out(rho.matrix().rows(), rho.matrix().cols());
  detail::lindblad_rhs_into(rho.matrix(), &h.matrix(), terms, out);
  return Operator(std::move(out));
}

using HamiltonianSource = std::function<Operator(double)>;

/// Called after every accepted step with (t, rho(t)).
using StepObserver = std::function<void(double, const Matrix&)>;

namespace detail {

template <typename HamiltonianAt>
DensityMatrix evolve_impl(const DensityMatrix& rho0, HamiltonianAt&& h_at, bool time_dependent,
                          const NoiseSchedule& schedule, double t0, double t1, const IntegratorConfig& cfg,
                          double dt, const StepObserver& observer) {
  if (!(t1 >= t0)) throw std::invalid_argument("evolve: t1 must be >= t0");
  const std::size_t n = rho0.num_qubits();
  schedule.validate(n);
  if (!(dt > 0) || !std::isfinite(dt)) throw std::invalid_argument("evolve: dt must be positive");

  const Eigen::Index d = rho0.matrix().rows();
  Matrix rho = rho0.matrix();
  Matrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), stage(d, d);
  std::vector<ActiveTerm> active;

  const double span = t1 - t0;
  const auto n_steps = span > 0 ? static_cast<long long>(std::ceil(span / dt - 1e-9)) : 0LL;

  // A constant Hamiltonian is fetched once; a zero one skips the commutator.
  Matrix h_const;
  const Matrix* h_ptr = nullptr;
  if (!time_dependent) {
    h_const = h_at(t0).matrix();
    if (!is_zero(h_const)) h_ptr = &h_const;
  }
  Matrix h_a, h_b, h_c;
  const Matrix* pa = h_ptr;
  const Matrix* pb = h_ptr;
  const Matrix* pc = h_ptr;

  // Spectral-radius bound of the generator: 2 sum(kappa) for the dissipator
  // plus 2 |H|_inf for the commutator. RK4 is stable for h * bound below ~2.5.
  constexpr double kStabilityLimit = 2.5;
  const auto h_bound = [](const Matrix* m) { return m ? 2.0 * m->cwiseAbs().rowwise().sum().maxCoeff() : 0.0; };
  const double h_const_bound = h_bound(h_ptr);

  double t = t0;
  for (long long step = 0; step < n_steps; ++step) {
    const double h = (step + 1 == n_steps) ? (t1 - t) : dt;
    collect_active(schedule, n, t + 0.5 * h, active);
    if (time_dependent) {
      h_a = h_at(t).matrix();
      h_b = h_at(t + 0.5 * h).matrix();
      h_c = h_at(t + h).matrix();
      pa = &h_a; pb = &h_b; pc = &h_c;
    }
    double bound = time_dependent ? std::max({h_bound(pa), h_bound(pb), h_bound(pc)}) : h_const_bound;
    for (const auto& a : active) bound += 2.0 * a.kappa;
    if (h * bound > kStabilityLimit) {
      throw NumericalError("evolve: step " + std::to_string(h) + " exceeds the RK4 stability limit (rate bound " +
                           std::to_string(bound) + ")");
    }
    lindblad_rhs_into(rho, pa, active, k1);
    stage = rho + (0.5 * h) * k1;
    lindblad_rhs_into(stage, pb, active, k2);
    stage = rho + (0.5 * h) * k2;
    lindblad_rhs_into(stage, pb, active, k3);
    stage = rho + h * k3;
    lindblad_rhs_into(stage, pc, active, k4);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    if (observer) observer(t, rho);
  }

  if (!rho.allFinite()) throw NumericalError("evolve: non-finite density matrix entries");
  const double drift = std::abs(rho.trace() - Complex(1.0));
  if (drift > cfg.tol_trace_drift) {
    throw NumericalError("evolve: trace drift " + std::to_string(drift) + " exceeds tolerance " +
                         std::to_string(cfg.tol_trace_drift) + " (dt too large?)");
  }
  return DensityMatrix::unchecked(Operator(std::move(rho)));
}

// Conservative angular-frequency scale of H: 2 * max row sum.
inline double omega_scale(const Operator& h) { return 2.0 * h.matrix().cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace detail

/// Integrates the Lindblad equation from t0 to t1 with fixed-step RK4.
///
/// Steps have size cfg.dt except the last, which is shortened to land on t1.
/// Noise terms are sampled at each step's midpoint, so windows aligned to the
/// step grid switch exactly at their edges. rho is never renormalized; a trace
/// drift beyond cfg.tol_trace_drift raises NumericalError.
inline DensityMatrix evolve(const DensityMatrix& rho0, const Operator& h, const NoiseSchedule& schedule, double t0,
                            double t1, const IntegratorConfig& cfg = {}, const StepObserver& observer = {}) {
  rho0.op().check_same_dim(h);
  const double dt = cfg.dt > 0 ? cfg.dt : default_dt(schedule.kappa_max(), detail::omega_scale(h));
  return detail::evolve_impl(rho0, [&h](double) -> const Operator& { return h; }, false, schedule, t0, t1, cfg, dt,
                             observer);
}

/// Time-dependent variant; `h` is queried at the RK4 stage times.
inline DensityMatrix evolve(const DensityMatrix& rho0, const HamiltonianSource& h, const NoiseSchedule& schedule,
                            double t0, double t1, const IntegratorConfig& cfg = {},
                            const StepObserver& observer = {}) {
  const double dt = cfg.dt > 0 ? cfg.dt : default_dt(schedule.kappa_max(), detail::omega_scale(h(t0)));
  return detail::evolve_impl(
      rho0,
      [&h, &rho0](double t) {
        Operator ht = h(t);
        rho0.op().check_same_dim(ht);
        return ht;
      },
      true, schedule, t0, t1, cfg, dt, observer);
}

struct BlochSample {
  double t;
  double norm;
};

/// |r(t)| of one qubit rotating about x (H = -½ b σ_x) under σ_z noise of rate kappa.
inline std::vector<BlochSample> depolarization_probe(double b_field, double kappa, double t_max,
                                                     const DensityMatrix& rho0, const IntegratorConfig& cfg = {}) {
  if (rho0.dim() != 2) throw std::invalid_argument("depolarization_probe needs a single-qubit state");
  const Operator h = pauli(Axis::x, 0, 1) * Complex(-0.5 * b_field);
  NoiseSchedule schedule;
  schedule.terms.push_back({0, Axis::z, kappa, 0.0, t_max});
  std::vector<BlochSample> out{{0.0, bloch_vector(rho0).norm()}};
  evolve(rho0, h, schedule, 0.0, t_max, cfg, [&out](double t, const Matrix& rho) {
    const Complex off = rho(0, 1);
    const double rz = (rho(0, 0) - rho(1, 1)).real();
    out.push_back({t, std::sqrt(4.0 * std::norm(off) + rz * rz)});
  });
  return out;
}

}  // namespace qtele
