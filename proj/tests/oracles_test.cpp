#include "qtele/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace o = qtele::oracle;
using std::numbers::pi;

namespace {

const o::Tag kAllTags[] = {o::Tag::A1z, o::Tag::A1x, o::Tag::A2iso, o::Tag::B1z,
                           o::Tag::B1x, o::Tag::B2iso, o::Tag::CDfit};
const o::Tag kPointwiseTags[] = {o::Tag::A1z, o::Tag::A1x, o::Tag::A2iso, o::Tag::B1z, o::Tag::B1x, o::Tag::B2iso};

}  // namespace

TEST(OracleCaseA, DephasingExamples) {
  for (double kt : {0.0, 0.3, 2.0, 10.0}) EXPECT_DOUBLE_EQ(o::f_case_a_z(0.0, 1.0, kt), 1.0);
  EXPECT_NEAR(o::f_case_a_z(pi / 2, 0.0, 1.5), 1.0 - 0.5 * (1.0 - std::exp(-3.0)), 1e-15);
  EXPECT_NEAR(o::f_case_a_z(pi / 2, 0.0, 1.5), 0.52489, 5e-6);
  for (double theta : {0.2, 1.0, 2.5}) {
    const double c = std::cos(theta);
    EXPECT_NEAR(o::f_case_a_z(theta, 0.0, 50.0), 0.5 * (1 + c * c), 1e-15);
  }
}

TEST(OracleCaseA, BitFlipExamples) {
  for (double kt : {0.0, 0.4, 3.0, 40.0}) EXPECT_NEAR(o::f_case_a_x(pi / 2, 0.0, kt), 1.0, 1e-15);
  for (double theta : {0.0, 0.7, 2.0})
    for (double phi : {0.0, 1.0, 4.0}) EXPECT_NEAR(o::f_case_a_x(theta, phi, 0.0), 1.0, 1e-15);
  const double theta = 1.1, phi = 0.4;
  const double s = std::sin(theta), c = std::cos(phi);
  EXPECT_NEAR(o::f_case_a_x(theta, phi, 60.0), 0.5 * (1 + s * s * c * c), 1e-15);
}

TEST(OracleCaseB, DoubledExponent) {
  EXPECT_NEAR(o::f_case_b('z', pi / 2, 0.0, 0.75), 0.52489, 5e-6);
  EXPECT_DOUBLE_EQ(o::f_case_b('z', 0.0, 0.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(o::f_case_b('x', 1.0, 2.0, 0.0), 1.0);
  for (double kt : {0.1, 0.6, 1.7}) {
    EXPECT_NEAR(o::f_case_b('z', 0.9, 0.3, kt), o::f_case_a_z(0.9, 0.3, 2 * kt), 1e-15);
    EXPECT_NEAR(o::f_case_b('x', 0.9, 0.3, kt), o::f_case_a_x(0.9, 0.3, 2 * kt), 1e-15);
  }
  EXPECT_THROW(o::f_case_b('y', 0.0, 0.0, 1.0), std::invalid_argument);
}

TEST(OracleAverage, ZeroNoiseIsPerfect) {
  for (o::Tag t : kAllTags) EXPECT_DOUBLE_EQ(o::favg({t, 0.0}), 1.0) << o::tag_name(t);
}

TEST(OracleAverage, Limits) {
  EXPECT_NEAR(o::favg({o::Tag::A1z, 40.0}), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(o::favg({o::Tag::B1x, 40.0}), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(o::favg({o::Tag::A2iso, 40.0}), 0.5, 1e-15);
  EXPECT_NEAR(o::favg({o::Tag::B2iso, 40.0}), 0.5, 1e-15);
  EXPECT_NEAR(o::favg({o::Tag::CDfit, 60.0}), 0.5, 1e-15);
  EXPECT_NEAR(o::favg({o::Tag::CDfit, 1.0}), 0.5 + 0.5 * std::exp(-1.25), 1e-15);
}

TEST(OracleAverage, IsotropicMatchesPointwise) {
  for (double kt : {0.2, 1.0}) {
    EXPECT_DOUBLE_EQ(o::fidelity({o::Tag::A2iso, kt}, 0.3, 0.1), o::favg({o::Tag::A2iso, kt}));
    EXPECT_DOUBLE_EQ(o::fidelity({o::Tag::B2iso, kt}, 2.3, 5.1), o::favg({o::Tag::B2iso, kt}));
  }
  EXPECT_THROW(o::f_isotropic(o::Tag::A1z, 0.1), std::invalid_argument);
  EXPECT_THROW(o::fidelity({o::Tag::CDfit, 0.1}, 0.0, 0.0), std::invalid_argument);
}

TEST(OracleProperties, OutputsStayInRange) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> th(0.0, pi), ph(0.0, 2 * pi), kt(0.0, 20.0);
  for (int i = 0; i < 2000; ++i) {
    const double theta = th(gen), phi = ph(gen), k = kt(gen);
    for (o::Tag t : kPointwiseTags) {
      const double f = o::fidelity({t, k}, theta, phi);
      EXPECT_GE(f, 0.5 - 1e-12);
      EXPECT_LE(f, 1.0 + 1e-15);
    }
    for (o::Tag t : kAllTags) {
      const double f = o::favg({t, k});
      EXPECT_GE(f, 0.5 - 1e-12);
      EXPECT_LE(f, 1.0);
    }
  }
}

TEST(OracleProperties, PhiSymmetry) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> th(0.0, pi), ph(0.0, 2 * pi), kt(0.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    const double theta = th(gen), phi = ph(gen), phi2 = ph(gen), k = kt(gen);
    EXPECT_EQ(o::f_case_a_z(theta, phi, k), o::f_case_a_z(theta, phi2, k));
    EXPECT_NEAR(o::f_case_a_x(theta, phi, k), o::f_case_a_x(theta, phi + pi, k), 1e-14);
  }
}

TEST(OracleProperties, MonotoneInNoise) {
  for (o::Tag t : kAllTags) {
    double prev = 1.0;
    for (int i = 1; i <= 30; ++i) {
      const double f = o::favg({t, 0.1 * i});
      EXPECT_LT(f, prev);
      prev = f;
    }
  }
}

TEST(OracleErrors, NegativeNoise) {
  EXPECT_THROW(o::f_case_a_z(0.0, 0.0, -0.1), std::domain_error);
  EXPECT_THROW(o::favg({o::Tag::B2iso, -1.0}), std::domain_error);
  EXPECT_THROW(o::favg({o::Tag::A1x, std::nan("")}), std::domain_error);
}

TEST(Horodecki, Examples) {
  EXPECT_DOUBLE_EQ(o::horodecki_optimal(1.0), 1.0);
  EXPECT_DOUBLE_EQ(o::horodecki_optimal(0.5), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(o::horodecki_optimal(0.0), 1.0 / 3.0);
  EXPECT_THROW(o::horodecki_optimal(1.01), std::domain_error);
  EXPECT_THROW(o::horodecki_optimal(-0.01), std::domain_error);
}

TEST(Horodecki, ConsistentWithPairDephasingAverage) {
  for (int i = 0; i <= 100; ++i) {
    const double kt = 0.05 * i;
    EXPECT_NEAR(o::horodecki_optimal(o::dephased_singlet_fraction(kt)), o::favg({o::Tag::B1z, kt}), 1e-12);
  }
  EXPECT_NEAR(o::horodecki_optimal(o::dephased_singlet_fraction(0.25)), 2.0 / 3.0 + std::exp(-1.0) / 3.0, 1e-15);
}

TEST(OracleTags, Names) {
  EXPECT_STREQ(o::tag_name(o::Tag::A1z), "A1z");
  EXPECT_STREQ(o::tag_name(o::Tag::B2iso), "B2iso");
  EXPECT_STREQ(o::tag_name(o::Tag::CDfit), "CDfit");
}
