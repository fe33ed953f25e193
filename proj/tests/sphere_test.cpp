#include "qtele/sphere.hpp"

#include <gtest/gtest.h>

#include <random>

#include "qtele/oracles.hpp"

using namespace qtele;

namespace {

std::vector<DecayPoint> sample_curve(double a, double b, double c, double x0, double x1, int n) {
  std::vector<DecayPoint> pts;
  for (int i = 0; i < n; ++i) {
    const double x = x0 + (x1 - x0) * i / (n - 1);
    pts.push_back({x, a + b * std::exp(-c * x)});
  }
  return pts;
}

}  // namespace

TEST(GaussLegendre, IntegratesMonomials) {
  for (std::size_t n : {1u, 2u, 5u, 16u, 32u}) {
    const auto rule = gauss_legendre(n);
    for (std::size_t d = 0; d <= 2 * n - 1; ++d) {
      double acc = 0;
      for (std::size_t i = 0; i < n; ++i) acc += rule.weights[i] * std::pow(rule.nodes[i], static_cast<double>(d));
      const double exact = d % 2 == 0 ? 2.0 / static_cast<double>(d + 1) : 0.0;
      EXPECT_NEAR(acc, exact, 1e-13) << "n=" << n << " d=" << d;
    }
  }
  EXPECT_THROW(gauss_legendre(0), std::invalid_argument);
}

TEST(GaussLegendre, NodesSortedAndSymmetric) {
  const auto rule = gauss_legendre(7);
  for (std::size_t i = 0; i + 1 < 7; ++i) EXPECT_LT(rule.nodes[i], rule.nodes[i + 1]);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_DOUBLE_EQ(rule.nodes[i], -rule.nodes[6 - i]);
    EXPECT_GT(rule.weights[i], 0.0);
  }
}

TEST(SphereAverage, ConstantAndCosSquared) {
  const QuadratureSpec spec;
  EXPECT_NEAR(average_over_sphere([](double, double) { return 1.0; }, spec), 1.0, 1e-15);
  EXPECT_NEAR(average_over_sphere([](double t, double) { return std::cos(t) * std::cos(t); }, spec), 1.0 / 3.0,
              1e-15);
}

TEST(SphereAverage, ExactForLowDegree) {
  const QuadratureSpec spec{6, 5};
  // Polynomials in cos(theta) up to degree 11.
  for (int d = 0; d <= 11; ++d) {
    const double got =
        average_over_sphere([d](double t, double) { return std::pow(std::cos(t), static_cast<double>(d)); }, spec);
    const double exact = d % 2 == 0 ? 1.0 / (d + 1) : 0.0;
    EXPECT_NEAR(got, exact, 1e-12) << d;
  }
  // Trigonometric polynomials in phi up to order 4 average to zero.
  for (int k = 1; k <= 4; ++k) {
    EXPECT_NEAR(average_over_sphere([k](double, double p) { return std::cos(k * p); }, spec), 0.0, 1e-12);
    EXPECT_NEAR(average_over_sphere([k](double, double p) { return std::sin(k * p); }, spec), 0.0, 1e-12);
  }
  // Order n_phi aliases onto the constant term.
  EXPECT_NEAR(average_over_sphere([](double, double p) { return std::cos(5 * p); }, spec), 1.0, 1e-12);
}

TEST(SphereAverage, ReproducesClosedFormAverages) {
  const QuadratureSpec spec;
  const oracle::Tag tags[] = {oracle::Tag::A1z, oracle::Tag::A1x, oracle::Tag::A2iso,
                              oracle::Tag::B1z, oracle::Tag::B1x, oracle::Tag::B2iso};
  for (double kt : {0.0, 0.25, 0.5, 1.0, 3.0}) {
    for (auto tag : tags) {
      const oracle::OracleCase c{tag, kt};
      const double avg = average_over_sphere([&](double t, double p) { return oracle::fidelity(c, t, p); }, spec);
      EXPECT_NEAR(avg, oracle::favg(c), 1e-10) << oracle::tag_name(tag) << " " << kt;
    }
  }
}

TEST(SphereAverage, RefinementIsStable) {
  for (double kt : {0.3, 1.2}) {
    for (auto tag : {oracle::Tag::A1x, oracle::Tag::B1z}) {
      const oracle::OracleCase c{tag, kt};
      const auto f = [&](double t, double p) { return oracle::fidelity(c, t, p); };
      EXPECT_NEAR(average_over_sphere(f, {16, 16}), average_over_sphere(f, {32, 32}), 1e-10);
    }
  }
}

TEST(SphereAverage, WeightsSumToOne) {
  double total = 0;
  for (const auto& n : sphere_nodes({9, 7})) {
    total += n.weight;
    EXPECT_GE(n.theta, 0.0);
    EXPECT_LE(n.theta, std::numbers::pi);
    EXPECT_LT(n.phi, 2 * std::numbers::pi);
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
  EXPECT_THROW(sphere_nodes({1, 8}), std::invalid_argument);
  EXPECT_THROW(sphere_nodes({8, 1}), std::invalid_argument);
}

TEST(FitExponential, RecoversGateNoiseModel) {
  const auto pts = sample_curve(0.5, 0.5, 1.25, 0.0, 5.0, 21);
  const DecayFit fit = fit_exponential(pts);
  EXPECT_NEAR(fit.asymptote, 0.5, 1e-6);
  EXPECT_NEAR(fit.amplitude, 0.5, 1e-6);
  EXPECT_NEAR(fit.rate, 1.25, 1e-6);
  EXPECT_LT(fit.residual_rms, 1e-9);
  EXPECT_FALSE(fit.asymptote_fixed);
}

TEST(FitExponential, RecoversSingleAxisAverage) {
  std::vector<DecayPoint> pts;
  for (int i = 0; i <= 12; ++i) {
    const double kt = 0.25 * i;
    pts.push_back({kt, oracle::favg({oracle::Tag::A1z, kt})});
  }
  const DecayFit fit = fit_exponential(pts);
  EXPECT_NEAR(fit.asymptote, 2.0 / 3.0, 1e-6);
  EXPECT_NEAR(fit.amplitude, 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(fit.rate, 2.0, 1e-6);
}

TEST(FitExponential, FixedAsymptote) {
  const auto pts = sample_curve(0.5, 0.5, 1.3, 0.0, 5.0, 11);
  const DecayFit fit = fit_exponential(pts, 0.5);
  EXPECT_TRUE(fit.asymptote_fixed);
  EXPECT_DOUBLE_EQ(fit.asymptote, 0.5);
  EXPECT_NEAR(fit.rate, 1.3, 1e-8);
  EXPECT_NEAR(fit(2.0), 0.5 + 0.5 * std::exp(-2.6), 1e-9);
}

TEST(FitExponential, NoisyDataStaysClose) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> noise(0.0, 1e-4);
  auto pts = sample_curve(0.6, 0.4, 0.9, 0.0, 6.0, 40);
  for (auto& p : pts) p.y += noise(gen);
  const DecayFit fit = fit_exponential(pts);
  EXPECT_NEAR(fit.rate, 0.9, 5e-3);
  EXPECT_NEAR(fit.residual_rms, 1e-4, 5e-5);
}

TEST(FitExponential, ScaleConsistent) {
  const auto base = sample_curve(0.55, 0.45, 1.7, 0.0, 4.0, 15);
  const DecayFit ref = fit_exponential(base);
  for (double s : {0.5, 2.0, 3.0}) {
    std::vector<DecayPoint> scaled;
    for (const auto& p : base) scaled.push_back({p.x * s, p.y});
    const DecayFit fit = fit_exponential(scaled);
    EXPECT_NEAR(fit.rate, ref.rate / s, 1e-8);
    EXPECT_NEAR(fit.asymptote, ref.asymptote, 1e-8);
  }
}

TEST(FitExponential, Deterministic) {
  const auto pts = sample_curve(0.5, 0.5, 1.1, 0.0, 5.0, 9);
  const DecayFit a = fit_exponential(pts), b = fit_exponential(pts);
  EXPECT_EQ(a.rate, b.rate);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(FitExponential, Errors) {
  const std::vector<DecayPoint> two{{0, 1}, {1, 0.5}};
  EXPECT_THROW(fit_exponential(two), std::invalid_argument);
  const std::vector<DecayPoint> flat{{0, 0.7}, {1, 0.7}, {2, 0.7}};
  EXPECT_THROW(fit_exponential(flat), std::invalid_argument);
  const std::vector<DecayPoint> dup{{0, 1}, {1, 0.8}, {1, 0.7}};
  EXPECT_THROW(fit_exponential(dup), std::invalid_argument);
  const std::vector<DecayPoint> nan{{0, 1}, {1, std::nan("")}, {2, 0.7}};
  EXPECT_THROW(fit_exponential(nan), std::invalid_argument);
}
