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
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qtele {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;

/// Default validation tolerances for density matrices.
inline constexpr double kTolTrace = 1e-9;
inline constexpr double kTolHerm = 1e-9;
inline constexpr double kTolPsd = 1e-8;

/// Raised when an integration or fit cannot produce a trustworthy number.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Axis { x, y, z };

inline char axis_name(Axis a) {
  switch (a) {
    case Axis::x: return 'x';
    case Axis::y: return 'y';
    case Axis::z: return 'z';
  }
  return '?';
}

inline Axis parse_axis(char c) {
  switch (c) {
    case 'x': case 'X': return Axis::x;
    case 'y': case 'Y': return Axis::y;
    case 'z': case 'Z': return Axis::z;
    default: throw std::invalid_argument(std::string("unknown axis '") + c + "'");
  }
}

namespace detail {

inline bool is_power_of_two(std::size_t v) { return v >= 2 && (v & (v - 1)) == 0; }

inline std::size_t log2_exact(std::size_t v) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < v) ++n;
  return n;
}

}  // namespace detail

/// Dense complex square matrix on a 2^n dimensional register space.
///
/// Qubit 0 is the tensor-first (most significant) factor, so basis index
/// bits read left to right as qubit 0, 1, ..., n-1.
class Operator {
 public:
  Operator() : m_(Matrix::Identity(2, 2)) {}

  explicit Operator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || !detail::is_power_of_two(static_cast<std::size_t>(m_.rows()))) {
      throw std::invalid_argument("Operator dimension must be a power of two >= 2, got " +
                                  std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()));
    }
  }

  static Operator identity(std::size_t n_qubits) {
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
    return Operator(Matrix::Identity(d, d));
  }
  static Operator zero(std::size_t n_qubits) {
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
    return Operator(Matrix::Zero(d, d));
  }

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t num_qubits() const { return detail::log2_exact(dim()); }

  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }

  Complex operator()(std::size_t r, std::size_t c) const {
    return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  Complex& operator()(std::size_t r, std::size_t c) {
    return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  Operator adjoint() const { return Operator(m_.adjoint()); }
  Complex trace() const { return m_.trace(); }

  /// Largest absolute entry of (this - other).
  double max_abs_diff(const Operator& other) const {
    check_same_dim(other);
    return (m_ - other.m_).cwiseAbs().maxCoeff();
  }

  /// U rho U^dagger.
  Operator conjugated_by(const Operator& u) const {
    check_same_dim(u);
    return Operator(u.m_ * m_ * u.m_.adjoint());
  }

  Operator& operator+=(const Operator& o) { check_same_dim(o); m_ += o.m_; return *this; }
  Operator& operator-=(const Operator& o) { check_same_dim(o); m_ -= o.m_; return *this; }
  Operator& operator*=(Complex s) { m_ *= s; return *this; }

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(Operator a, Complex s) { return a *= s; }
  friend Operator operator*(Complex s, Operator a) { return a *= s; }
  friend Operator operator*(const Operator& a, const Operator& b) {
    a.check_same_dim(b);
    return Operator(a.m_ * b.m_);
  }

  void check_same_dim(const Operator& o) const {
    if (o.dim() != dim()) {
      throw std::invalid_argument("operator dimension mismatch: " + std::to_string(dim()) + " vs " +
                                  std::to_string(o.dim()));
    }
  }

 private:
  Matrix m_;
};

/// Kronecker product a (x) b; a is the tensor-first factor.
inline Operator tensor(const Operator& a, const Operator& b) {
  const auto& ma = a.matrix();
  const auto& mb = b.matrix();
  const Eigen::Index db = mb.rows();
  Matrix out(ma.rows() * db, ma.cols() * db);
  for (Eigen::Index i = 0; i < ma.rows(); ++i) {
    for (Eigen::Index j = 0; j < ma.cols(); ++j) {
      out.block(i * db, j * db, db, db) = ma(i, j) * mb;
    }
  }
  return Operator(std::move(out));
}

inline StateVector tensor(const StateVector& a, const StateVector& b) {
  StateVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline Matrix pauli_matrix(Axis axis) {
  Matrix s(2, 2);
  switch (axis) {
    case Axis::x: s << 0, 1, 1, 0; break;
    case Axis::y: s << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case Axis::z: s << 1, 0, 0, -1; break;
  }
  return s;
}

/// Embeds a single-qubit 2x2 matrix at position `qubit` of an n-qubit register.
inline Operator embed(const Matrix& single, std::size_t qubit, std::size_t n_qubits) {
  if (qubit >= n_qubits) {
    throw std::out_of_range("qubit index " + std::to_string(qubit) + " out of range for " +
                            std::to_string(n_qubits) + " qubits");
  }
  Operator out(single);
  if (qubit > 0) out = tensor(Operator::identity(qubit), out);
  if (qubit + 1 < n_qubits) out = tensor(out, Operator::identity(n_qubits - qubit - 1));
  return out;
}

/// sigma_axis acting on `qubit`, identity elsewhere.
inline Operator pauli(Axis axis, std::size_t qubit, std::size_t n_qubits) {
  return embed(pauli_matrix(axis), qubit, n_qubits);
}

struct DensityTolerances {
  double trace = kTolTrace;
  double herm = kTolHerm;
  double psd = kTolPsd;
};

/// Trace-one, Hermitian, positive semidefinite operator.
class DensityMatrix {
 public:
  /// Validates `op`; throws std::invalid_argument on failure.
  explicit DensityMatrix(Operator op, DensityTolerances tol = {}) : op_(std::move(op)) {
    const std::string why = violation(op_, tol);
    if (!why.empty()) throw std::invalid_argument("invalid density matrix: " + why);
  }

  /// Skips validation. For intermediate states produced by trusted kernels.
  static DensityMatrix unchecked(Operator op) { return DensityMatrix(std::move(op), Unchecked{}); }

  /// Empty string when `op` is a valid density matrix, else a description.
  static std::string violation(const Operator& op, DensityTolerances tol = {}) {
    const Matrix& m = op.matrix();
    if (!m.allFinite()) return "non-finite entries";
    const Complex tr = m.trace();
    if (std::abs(tr - Complex(1.0)) > tol.trace) {
      return "trace " + std::to_string(tr.real()) + "+" + std::to_string(tr.imag()) + "i";
    }
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol.herm) return "non-Hermitian (deviation " + std::to_string(herm) + ")";
    const Matrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -tol.psd) return "negative eigenvalue " + std::to_string(min_eig);
    return {};
  }

  const Operator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  std::size_t dim() const { return op_.dim(); }
  std::size_t num_qubits() const { return op_.num_qubits(); }

  DensityMatrix evolved_by(const Operator& u) const { return unchecked(op_.conjugated_by(u)); }

  static DensityMatrix maximally_mixed(std::size_t n_qubits) {
    return unchecked(Operator::identity(n_qubits) * Complex(1.0 / double(std::size_t{1} << n_qubits)));
  }

  static DensityMatrix projector(const StateVector& psi) {
    return DensityMatrix(Operator(psi * psi.adjoint()));
  }

 private:
  struct Unchecked {};
  DensityMatrix(Operator op, Unchecked) : op_(std::move(op)) {}

  Operator op_;
};

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::unchecked(tensor(a.op(), b.op()));
}

/// Reduced density matrix over the qubits listed in `keep` (kept in ascending order).
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<std::size_t> keep) {
  const std::size_t n = rho.num_qubits();
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw std::invalid_argument("partial_trace: duplicate qubit in keep set");
  }
  if (keep.back() >= n) {
    throw std::out_of_range("partial_trace: qubit " + std::to_string(keep.back()) + " out of range");
  }
  std::vector<std::size_t> traced;
  for (std::size_t q = 0; q < n; ++q) {
    if (!std::binary_search(keep.begin(), keep.end(), q)) traced.push_back(q);
  }
  const auto bit = [n](std::size_t q) { return std::size_t{1} << (n - 1 - q); };
  // Scatter the bits of a compact index into register positions.
  const auto spread = [&](std::size_t compact, const std::vector<std::size_t>& qubits) {
    std::size_t full = 0;
    const std::size_t k = qubits.size();
    for (std::size_t i = 0; i < k; ++i) {
      if (compact & (std::size_t{1} << (k - 1 - i))) full |= bit(qubits[i]);
    }
    return full;
  };
  const std::size_t dk = std::size_t{1} << keep.size();
  const std::size_t dt = std::size_t{1} << traced.size();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t r = 0; r < dk; ++r) {
    const std::size_t fr = spread(r, keep);
    for (std::size_t c = 0; c < dk; ++c) {
      const std::size_t fc = spread(c, keep);
      Complex acc = 0;
      for (std::size_t e = 0; e < dt; ++e) {
        const std::size_t fe = spread(e, traced);
        acc += rho.op()(fr | fe, fc | fe);
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
    }
  }
  return DensityMatrix::unchecked(Operator(std::move(out)));
}

/// Polar/azimuthal angles of a pure single-qubit input state.
struct PureStateAngles {
  double theta = 0.0;
  double phi = 0.0;
};

/// cos(θ/2) e^{iφ/2} |0> + sin(θ/2) e^{-iφ/2} |1>.
///
/// The symmetric half-angle phases differ from the e^{iφ} |1> form only by a
/// global phase, and flip the sign of the y Bloch component relative to it.
inline StateVector state_vector(PureStateAngles a) {
  if (!(a.theta >= 0.0 && a.theta <= kPi + 1e-12)) {
    throw std::domain_error("theta must lie in [0, pi], got " + std::to_string(a.theta));
  }
  StateVector v(2);
  v(0) = std::cos(a.theta / 2) * std::polar(1.0, a.phi / 2);
  v(1) = std::sin(a.theta / 2) * std::polar(1.0, -a.phi / 2);
  return v;
}

inline DensityMatrix pure_state(PureStateAngles a) { return DensityMatrix::projector(state_vector(a)); }

/// (|00> + |11>) / sqrt(2)
inline StateVector bell_phi_plus_vector() {
  StateVector v = StateVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v;
}

inline DensityMatrix bell_phi_plus() { return DensityMatrix::projector(bell_phi_plus_vector()); }

/// The four Bell states in the order Φ+, Φ-, Ψ+, Ψ-.
inline std::array<StateVector, 4> bell_basis() {
  const double s = 1.0 / std::sqrt(2.0);
  std::array<StateVector, 4> b;
  for (auto& v : b) v = StateVector::Zero(4);
  b[0](0) = s; b[0](3) = s;
  b[1](0) = s; b[1](3) = -s;
  b[2](1) = s; b[2](2) = s;
  b[3](1) = s; b[3](2) = -s;
  return b;
}

/// <psi| rho |psi>.
inline double fidelity_pure(const StateVector& psi, const DensityMatrix& rho) {
  if (static_cast<std::size_t>(psi.size()) != rho.dim()) {
    throw std::invalid_argument("fidelity_pure: state has dimension " + std::to_string(psi.size()) +
                                ", density matrix " + std::to_string(rho.dim()));
  }
  return (psi.adjoint() * rho.matrix() * psi)(0).real();
}

struct BlochVector {
  double rx = 0.0;
  double ry = 0.0;
  double rz = 0.0;

  double norm() const { return std::sqrt(rx * rx + ry * ry + rz * rz); }
};

inline BlochVector bloch_vector(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw std::invalid_argument("bloch_vector needs a single-qubit state");
  const Matrix& m = rho.matrix();
  // r_a = Tr(rho sigma_a)
  return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

/// ½(I + r·σ)
inline DensityMatrix from_bloch(const BlochVector& r) {
  Matrix m(2, 2);
  m << 0.5 * (1 + r.rz), 0.5 * Complex(r.rx, -r.ry), 0.5 * Complex(r.rx, r.ry), 0.5 * (1 - r.rz);
  return DensityMatrix(Operator(std::move(m)));
}

/// Index into bell_basis() of the largest overlap <Φ|rho|Φ>; ties resolve to the lowest index.
inline std::size_t dominant_bell_state(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw std::invalid_argument("expected a two-qubit density matrix");
  const auto basis = bell_basis();
  std::size_t best = 0;
  double best_val = -1.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double v = fidelity_pure(basis[k], rho);
    if (v > best_val + 1e-12) {
      best_val = v;
      best = k;
    }
  }
  return best;
}

/// Largest overlap of a two-qubit state with the four Bell states.
inline double singlet_fraction(const DensityMatrix& rho) {
  return fidelity_pure(bell_basis()[dominant_bell_state(rho)], rho);
}

// Reference gates as exact matrices.

inline Operator hadamard_gate(std::size_t qubit, std::size_t n_qubits) {
  Matrix h(2, 2);
  h << 1, 1, 1, -1;
  return embed(h / std::sqrt(2.0), qubit, n_qubits);
}

/// Permutation matrix flipping `target` when `control` is set.
inline Operator cnot_gate(std::size_t control, std::size_t target, std::size_t n_qubits) {
  if (control >= n_qubits || target >= n_qubits) throw std::out_of_range("cnot_gate: qubit out of range");
  if (control == target) throw std::invalid_argument("cnot_gate: control equals target");
  const std::size_t d = std::size_t{1} << n_qubits;
  const std::size_t cm = std::size_t{1} << (n_qubits - 1 - control);
  const std::size_t tm = std::size_t{1} << (n_qubits - 1 - target);
  Matrix u = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t j = (i & cm) ? (i ^ tm) : i;
    u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return Operator(std::move(u));
}

inline Operator cz_gate(std::size_t control, std::size_t target, std::size_t n_qubits) {
  if (control >= n_qubits || target >= n_qubits) throw std::out_of_range("cz_gate: qubit out of range");
  if (control == target) throw std::invalid_argument("cz_gate: control equals target");
  const std::size_t d = std::size_t{1} << n_qubits;
  const std::size_t cm = std::size_t{1} << (n_qubits - 1 - control);
  const std::size_t tm = std::size_t{1} << (n_qubits - 1 - target);
  Matrix u = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    if ((i & cm) && (i & tm)) u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = -1.0;
  }
  return Operator(std::move(u));
}

/// Max-abs difference of a and b after removing the global phase of b relative to a.
inline double phase_aligned_diff(const Operator& a, const Operator& b) {
  a.check_same_dim(b);
  const Complex overlap = (b.matrix().adjoint() * a.matrix()).trace();
  const Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1.0);
  return (a.matrix() - phase * b.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace qtele
