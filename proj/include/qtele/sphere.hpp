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
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qtele/quantum.hpp"

namespace qtele {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], by Newton iteration on P_n.
inline QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      dp = nd * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  // Remove accumulated rounding so the weights sum to 2.
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w *= 2.0 / total;
  return rule;
}

/// Gauss-Legendre in cos(theta) times the uniform (trapezoid) rule in phi.
struct QuadratureSpec {
  std::size_t n_theta = 32;
  std::size_t n_phi = 32;

  void validate() const {
    if (n_theta < 2 || n_phi < 2) throw std::invalid_argument("quadrature needs n_theta, n_phi >= 2");
  }
};

/// A point on the sphere with its normalized quadrature weight (weights sum to 1).
struct SphereNode {
  double theta;
  double phi;
  double weight;
};

inline std::vector<SphereNode> sphere_nodes(const QuadratureSpec& spec) {
  spec.validate();
  const QuadratureRule gl = gauss_legendre(spec.n_theta);
  std::vector<SphereNode> nodes;
  nodes.reserve(spec.n_theta * spec.n_phi);
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(spec.n_phi);
  for (std::size_t i = 0; i < spec.n_theta; ++i) {
    const double theta = std::acos(std::clamp(gl.nodes[i], -1.0, 1.0));
    for (std::size_t j = 0; j < spec.n_phi; ++j) {
      nodes.push_back({theta, dphi * static_cast<double>(j), 0.5 * gl.weights[i] / static_cast<double>(spec.n_phi)});
    }
  }
  return nodes;
}

/// (1/4π) ∫∫ f(θ, φ) sin θ dθ dφ, summed φ-inner so f ≡ 1 gives 1 to rounding.
template <typename F>
double average_over_sphere(F&& f, const QuadratureSpec& spec = {}) {
  spec.validate();
  const QuadratureRule gl = gauss_legendre(spec.n_theta);
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(spec.n_phi);
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.n_theta; ++i) {
    const double theta = std::acos(std::clamp(gl.nodes[i], -1.0, 1.0));
    double row = 0.0;
    for (std::size_t j = 0; j < spec.n_phi; ++j) row += f(theta, dphi * static_cast<double>(j));
    acc += 0.5 * gl.weights[i] * (row / static_cast<double>(spec.n_phi));
  }
  return acc;
}

/// Model a + b exp(-c x).
struct DecayFit {
  double asymptote = 0.0;
  double amplitude = 0.0;
  double rate = 0.0;
  double residual_rms = 0.0;
  int iterations = 0;
  bool asymptote_fixed = false;

  double operator()(double x) const { return asymptote + amplitude * std::exp(-rate * x); }
};

struct DecayPoint {
  double x;
  double y;
};

/// Levenberg-Marquardt least squares for a + b e^{-c x}, optionally with a fixed.
///
/// Starts from a = min(y), b = max(y) - a, c = 1 and stops when an accepted
/// step moves every parameter by less than 1e-10. Throws NumericalError after
/// 200 iterations without convergence.
inline DecayFit fit_exponential(std::span<const DecayPoint> points, std::optional<double> fix_asymptote = {}) {
  if (points.size() < 3) throw std::invalid_argument("fit_exponential needs at least 3 points");
  std::vector<double> xs;
  double ymin = points[0].y, ymax = points[0].y;
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("fit_exponential: non-finite data");
    xs.push_back(p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  std::sort(xs.begin(), xs.end());
  if (std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
    throw std::invalid_argument("fit_exponential: x values must be distinct");
  }
  if (ymax - ymin <= 1e-14 * std::max(1.0, std::abs(ymax))) {
    throw std::invalid_argument("fit_exponential: degenerate data (all values equal)");
  }

  const bool fixed = fix_asymptote.has_value();
  const int np = fixed ? 2 : 3;
  // Parameter vector: (b, c) when fixed, else (a, b, c).
  Eigen::VectorXd p(np);
  const double a0 = fixed ? *fix_asymptote : ymin;
  if (fixed) p << ymax - a0, 1.0;
  else p << a0, ymax - a0, 1.0;

  const auto unpack = [&](const Eigen::VectorXd& v) {
    return fixed ? std::array<double, 3>{*fix_asymptote, v(0), v(1)} : std::array<double, 3>{v(0), v(1), v(2)};
  };
  const auto sse = [&](const Eigen::VectorXd& v) {
    const auto [a, b, c] = unpack(v);
    double s = 0.0;
    for (const auto& pt : points) {
      const double r = pt.y - (a + b * std::exp(-c * pt.x));
      s += r * r;
    }
    return s;
  };

  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd jac(m, np);
  Eigen::VectorXd res(m);
  double lambda = 1e-3;
  double cost = sse(p);
  bool converged = false;
  int iter = 0;
  constexpr int kMaxIterations = 200;
  for (; iter < kMaxIterations && !converged; ++iter) {
    const auto [a, b, c] = unpack(p);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double x = points[static_cast<std::size_t>(i)].x;
      const double e = std::exp(-c * x);
      res(i) = points[static_cast<std::size_t>(i)].y - (a + b * e);
      Eigen::Index col = 0;
      if (!fixed) jac(i, col++) = 1.0;
      jac(i, col++) = e;
      jac(i, col) = -b * x * e;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * res;
    // Inner loop: raise damping until the step reduces the cost.
    while (true) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd step = lhs.ldlt().solve(jtr);
      const Eigen::VectorXd trial = p + step;
      const double trial_cost = sse(trial);
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        p = trial;
        cost = trial_cost;
        lambda = std::max(lambda / 10.0, 1e-12);
        if (step.cwiseAbs().maxCoeff() < 1e-10) converged = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e14) {
        // No descent direction left at working precision: already at the minimum.
        converged = true;
        break;
      }
    }
  }
  if (!converged) {
    throw NumericalError("fit_exponential did not converge in " + std::to_string(kMaxIterations) + " iterations");
  }
  const auto [a, b, c] = unpack(p);
  DecayFit fit;
  fit.asymptote = a;
  fit.amplitude = b;
  fit.rate = c;
  fit.residual_rms = std::sqrt(cost / static_cast<double>(points.size()));
  fit.iterations = iter;
  fit.asymptote_fixed = fixed;
  return fit;
}

}  // namespace qtele
