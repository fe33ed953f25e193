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

// Closed-form teleportation fidelities for Pauli noise with H = 0.
//
// Deliberately free of any dependency on the simulator headers: these are the
// reference values the numerical engine is checked against.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace qtele::oracle {

enum class Tag {
  A1z,    // input qubit, sigma_z noise
  A1x,    // input qubit, sigma_x noise
  A2iso,  // input qubit, isotropic noise
  B1z,    // both halves of the pair, sigma_z noise
  B1x,    // both halves of the pair, sigma_x noise
  B2iso,  // both halves of the pair, isotropic noise
  CDfit,  // empirical fit for noise during the gates
};

struct OracleCase {
  Tag tag = Tag::A1z;
  double kappa_tau = 0.0;
};

namespace detail {

inline void check_kappa_tau(double kt) {
  if (!(kt >= 0)) throw std::domain_error("kappa_tau must be >= 0, got " + std::to_string(kt));
}

// Single-axis closed forms with a generic decay factor e = exp(-rate * kappa_tau).
inline double z_form(double theta, double e) {
  const double s = std::sin(theta);
  return 1.0 - 0.5 * (1.0 - e) * s * s;
}

inline double x_form(double theta, double phi, double e) {
  const double s2 = std::sin(theta) * std::sin(theta);
  const double c2 = std::cos(theta) * std::cos(theta);
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  return 0.5 * (1.0 + s2 * cp * cp + e * (c2 + s2 * sp * sp));
}

}  // namespace detail

/// 1 - ½(1 - e^{-2κτ}) sin²θ
inline double f_case_a_z(double theta, double /*phi*/, double kappa_tau) {
  detail::check_kappa_tau(kappa_tau);
  return detail::z_form(theta, std::exp(-2.0 * kappa_tau));
}

/// ½[1 + sin²θ cos²φ + e^{-2κτ}(cos²θ + sin²θ sin²φ)]
inline double f_case_a_x(double theta, double phi, double kappa_tau) {
  detail::check_kappa_tau(kappa_tau);
  return detail::x_form(theta, phi, std::exp(-2.0 * kappa_tau));
}

/// Case A forms with 2κτ replaced by 4κτ. Only axes 'x' and 'z' have printed forms.
inline double f_case_b(char axis, double theta, double phi, double kappa_tau) {
  detail::check_kappa_tau(kappa_tau);
  const double e = std::exp(-4.0 * kappa_tau);
  switch (axis) {
    case 'z': return detail::z_form(theta, e);
    case 'x': return detail::x_form(theta, phi, e);
    default: throw std::invalid_argument(std::string("f_case_b: no closed form for axis '") + axis + "'");
  }
}

/// Isotropic noise gives an angle-independent fidelity.
inline double f_isotropic(Tag tag, double kappa_tau) {
  detail::check_kappa_tau(kappa_tau);
  switch (tag) {
    case Tag::A2iso: return 0.5 + 0.5 * std::exp(-4.0 * kappa_tau);
    case Tag::B2iso: return 0.5 + 0.5 * std::exp(-8.0 * kappa_tau);
    default: throw std::invalid_argument("f_isotropic: tag is not isotropic");
  }
}

/// Pointwise F(θ, φ) for every tag with a closed form (all but CDfit).
inline double fidelity(const OracleCase& c, double theta, double phi) {
  switch (c.tag) {
    case Tag::A1z: return f_case_a_z(theta, phi, c.kappa_tau);
    case Tag::A1x: return f_case_a_x(theta, phi, c.kappa_tau);
    case Tag::B1z: return f_case_b('z', theta, phi, c.kappa_tau);
    case Tag::B1x: return f_case_b('x', theta, phi, c.kappa_tau);
    case Tag::A2iso:
    case Tag::B2iso: return f_isotropic(c.tag, c.kappa_tau);
    case Tag::CDfit: break;
  }
  throw std::invalid_argument("no pointwise closed form for the gate-noise fit");
}

/// Sphere-averaged fidelity.
inline double favg(const OracleCase& c) {
  detail::check_kappa_tau(c.kappa_tau);
  const double kt = c.kappa_tau;
  switch (c.tag) {
    case Tag::A1z:
    case Tag::A1x: return 2.0 / 3.0 + std::exp(-2.0 * kt) / 3.0;
    case Tag::A2iso: return 0.5 + 0.5 * std::exp(-4.0 * kt);
    case Tag::B1z:
    case Tag::B1x: return 2.0 / 3.0 + std::exp(-4.0 * kt) / 3.0;
    case Tag::B2iso: return 0.5 + 0.5 * std::exp(-8.0 * kt);
    case Tag::CDfit: return 0.5 + 0.5 * std::exp(-1.25 * kt);  // fitted, not derived
  }
  throw std::invalid_argument("favg: unknown tag");
}

/// Optimal standard-teleportation fidelity (2 F_AB + 1) / 3 for singlet fraction F_AB.
inline double horodecki_optimal(double f_ab) {
  if (!(f_ab >= 0.0 && f_ab <= 1.0)) {
    throw std::domain_error("singlet fraction must lie in [0, 1], got " + std::to_string(f_ab));
  }
  return (2.0 * f_ab + 1.0) / 3.0;
}

/// Singlet fraction of |Φ+> after σ_z noise on both qubits: (1 + e^{-4κτ}) / 2.
inline double dephased_singlet_fraction(double kappa_tau) {
  detail::check_kappa_tau(kappa_tau);
  return 0.5 * (1.0 + std::exp(-4.0 * kappa_tau));
}

inline const char* tag_name(Tag t) {
  switch (t) {
    case Tag::A1z: return "A1z";
    case Tag::A1x: return "A1x";
    case Tag::A2iso: return "A2iso";
    case Tag::B1z: return "B1z";
    case Tag::B1x: return "B1x";
    case Tag::B2iso: return "B2iso";
    case Tag::CDfit: return "CDfit";
  }
  return "?";
}

}  // namespace qtele::oracle
