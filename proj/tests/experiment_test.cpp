#include "qtele/experiment.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <set>

namespace ex = qtele::experiment;
using namespace qtele;

TEST(ParseFlags, Cases) {
  EXPECT_EQ(ex::parse_case("A"), CaseTag::A);
  EXPECT_EQ(ex::parse_case("d"), CaseTag::D);
  EXPECT_THROW(ex::parse_case("E"), ex::UsageError);
  EXPECT_THROW(ex::parse_case("AB"), ex::UsageError);
  EXPECT_THROW(ex::parse_case(""), ex::UsageError);
}

TEST(ParseFlags, Axes) {
  EXPECT_EQ(ex::parse_axes("z"), std::vector<Axis>{Axis::z});
  EXPECT_EQ(ex::parse_axes("xyz"), (std::vector<Axis>{Axis::x, Axis::y, Axis::z}));
  EXPECT_EQ(ex::axes_string(ex::parse_axes("zx")), "zx");
  EXPECT_THROW(ex::parse_axes(""), ex::UsageError);
  EXPECT_THROW(ex::parse_axes("xx"), ex::UsageError);
  EXPECT_THROW(ex::parse_axes("w"), ex::UsageError);
}

TEST(ParseFlags, Sweep) {
  EXPECT_EQ(ex::parse_sweep("0:1:3"), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(ex::parse_sweep("0.25:0.25:1"), std::vector<double>{0.25});
  const auto g = ex::parse_sweep("0:5:21");
  ASSERT_EQ(g.size(), 21u);
  EXPECT_EQ(g.back(), 5.0);
  for (const char* bad : {"", "1:2", "0:1:2:3", "a:1:2", "0:1:0", "0:1:2.5", "1:0:3", "-1:1:3", "0:inf:3"}) {
    EXPECT_THROW(ex::parse_sweep(bad), ex::UsageError) << bad;
  }
}

TEST(ParseFlags, Format) {
  EXPECT_EQ(ex::parse_format("csv"), ex::Format::csv);
  EXPECT_EQ(ex::parse_format("json"), ex::Format::json);
  EXPECT_THROW(ex::parse_format("xml"), ex::UsageError);
}

TEST(OracleMapping, CoversClosedForms) {
  EXPECT_EQ(ex::oracle_tag(CaseTag::A, {Axis::z}), oracle::Tag::A1z);
  EXPECT_EQ(ex::oracle_tag(CaseTag::A, {Axis::x}), oracle::Tag::A1x);
  EXPECT_EQ(ex::oracle_tag(CaseTag::B, {Axis::z, Axis::x, Axis::y}), oracle::Tag::B2iso);
  EXPECT_EQ(ex::oracle_tag(CaseTag::C, {Axis::z}), oracle::Tag::CDfit);
  EXPECT_FALSE(ex::oracle_tag(CaseTag::A, {Axis::y}).has_value());
  EXPECT_FALSE(ex::oracle_tag(CaseTag::B, {Axis::x, Axis::z}).has_value());
}

TEST(Formatting, TwelveSignificantDigits) {
  EXPECT_EQ(ex::fmt(1.0), "1");
  EXPECT_EQ(ex::fmt(kPi), "3.14159265359");
  EXPECT_EQ(ex::fmt(0.5 + 0.5 * std::exp(-3.0)), "0.524893534184");
  EXPECT_EQ(ex::fmt(1e-20), "1e-20");
}

TEST(SurfaceOutput, CsvLayout) {
  const Surface s{{0.0, 1.0}, {0.0, 2.0, 4.0}, {1, 2, 3, 4, 5, 6}};
  EXPECT_EQ(ex::surface_csv(s), "theta,phi,fidelity\n0,0,1\n0,2,2\n0,4,3\n1,0,4\n1,2,5\n1,4,6\n");
  const auto j = ex::surface_json(s, {CaseTag::B, {Axis::z}, 0.5});
  EXPECT_EQ(j["case"], "B");
  EXPECT_EQ(j["fidelity"].size(), 6u);
}

TEST(AverageOutput, CsvAndRoundTrip) {
  const std::vector<AveragePoint> pts{{0.0, 1.0}, {0.5, 0.75}, {1.0, 0.6}};
  const auto rows = ex::average_rows(pts, oracle::Tag::A1z);
  const std::string csv = ex::average_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "kappa_tau,f_avg_numeric,f_avg_oracle");
  std::istringstream in(csv);
  const auto back = ex::read_average_csv(in);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[1].x, 0.5);
  EXPECT_EQ(back[1].y, 0.75);
  EXPECT_EQ(ex::average_csv(ex::average_rows(pts, std::nullopt)), "kappa_tau,f_avg_numeric\n0,1\n0.5,0.75\n1,0.6\n");
  std::istringstream bad("theta,phi\n1,2\n");
  EXPECT_THROW(ex::read_average_csv(bad), ex::UsageError);
}

TEST(AverageOutput, FitFromPrintedValuesIsReproducible) {
  std::vector<AveragePoint> pts;
  for (int i = 0; i <= 10; ++i) pts.push_back({0.5 * i, 0.5 + 0.5 * std::exp(-1.2 * 0.5 * i) + 1e-7 * std::sin(i)});
  const auto rows = ex::average_rows(pts, std::nullopt);
  const DecayFit direct = fit_exponential(ex::as_printed(rows), 0.5);
  std::istringstream in(ex::average_csv(rows));
  const DecayFit refit = fit_exponential(ex::read_average_csv(in), 0.5);
  EXPECT_NEAR(direct.rate, refit.rate, 1e-12);
  EXPECT_NEAR(direct.amplitude, refit.amplitude, 1e-12);
  const auto j = ex::fit_json(direct, rows.size());
  EXPECT_EQ(j["asymptote_fixed"], true);
  EXPECT_EQ(j["points"], 11);
}

TEST(GcurveOutput, Csv) {
  EXPECT_EQ(ex::gcurve_csv({{0.0, 0.0}, {1.0, 0.125}}), "kappa_tau,g\n0,0\n1,0.125\n");
}

TEST(Channels, NamedSpecs) {
  EXPECT_NEAR(singlet_fraction(ex::parse_channel("popescu")), 0.625, 1e-12);
  EXPECT_NEAR(singlet_fraction(ex::parse_channel("maximally-mixed")), 0.25, 1e-12);
  EXPECT_NEAR(singlet_fraction(ex::parse_channel("dephased:1.0")), 0.5 * (1 + std::exp(-1.0)), 1e-8);
  EXPECT_THROW(ex::parse_channel("werner"), ex::UsageError);
  EXPECT_THROW(ex::parse_channel("dephased:-1"), ex::UsageError);
  EXPECT_THROW(ex::parse_channel("dephased:abc"), ex::UsageError);
  EXPECT_THROW(ex::parse_channel("file:/nonexistent/channel.txt"), ex::UsageError);
}

TEST(Channels, TextFormat) {
  std::istringstream good(
      "# Phi+\n"
      "0.5,0 0,0 0,0 0.5,0\n"
      "0,0   0,0 0,0 0,0\n"
      "\n"
      "0,0 0,0 0,0 0,0\n"
      "0.5,0 0,0 0,0 0.5,0\n");
  const DensityMatrix rho = ex::parse_channel_text(good);
  EXPECT_NEAR(singlet_fraction(rho), 1.0, 1e-12);

  const char* bad[] = {
      "1,0 0,0 0,0 0,0\n",                                                               // too few rows
      "1,0 0,0 0,0\n0,0 0,0 0,0 0,0\n0,0 0,0 0,0 0,0\n0,0 0,0 0,0 0,0\n",                 // short row
      "1 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n",                                            // not re,im
      "0.5,0 0,0 0,0 0,0\n0,0 0.5,0 0,0 0,0\n0,0 0,0 0.5,0 0,0\n0,0 0,0 0,0 0.5,0\n",    // trace 2
      "0.5,0 0,0 0,0 0.5,0\n0,0 0,0 0,0 0,0\n0,0 0,0 0,0 0,0\n-0.5,0 0,0 0,0 0.5,0\n",   // not Hermitian
      "0.75,0 0,0 0,0 0,0\n0,0 -0.25,0 0,0 0,0\n0,0 0,0 0.25,0 0,0\n0,0 0,0 0,0 0.25,0\n", // negative
  };
  for (const char* text : bad) {
    std::istringstream in(text);
    EXPECT_THROW(ex::parse_channel_text(in), ex::UsageError) << text;
  }
}

TEST(Channels, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "qtele_channel_test.txt";
  ex::write_text_file(path.string(),
                      "0,0 0,0 0,0 0,0\n0,0 0.5,0 -0.5,0 0,0\n0,0 -0.5,0 0.5,0 0,0\n0,0 0,0 0,0 0,0\n");
  const DensityMatrix rho = ex::parse_channel("file:" + path.string());
  EXPECT_EQ(dominant_bell_state(rho), 3u);
  std::filesystem::remove(path);
}

TEST(Channels, Report) {
  const auto j = ex::channel_report(popescu_channel(), "popescu", linspace(0, kPi, 5), linspace(0, 2 * kPi, 5));
  EXPECT_EQ(j["samples"].size(), 25u);
  for (const auto& s : j["samples"]) EXPECT_NEAR(s["fidelity"].get<double>(), 0.75, 1e-9);
  EXPECT_NEAR(j["f_avg"].get<double>(), 0.75, 1e-9);
  EXPECT_NEAR(j["horodecki_optimal"].get<double>(), 0.75, 1e-12);
  EXPECT_EQ(j["dominant_bell_state"], "psi-");
  const auto mixed = ex::channel_report(DensityMatrix::maximally_mixed(2), "maximally-mixed", {0.3}, {0.2});
  EXPECT_NEAR(mixed["f_avg"].get<double>(), 0.5, 1e-12);
}

TEST(Manifest, FieldsAndIds) {
  ex::RunManifest m;
  m.id = ex::new_run_id();
  m.command = "qtele surface --case A";
  m.subcommand = "surface";
  m.noise = NoiseCase{CaseTag::A, {Axis::x, Axis::z}, 0.5};
  m.kappa_tau = {0.5};
  m.theta_points = 41;
  m.phi_points = 41;
  m.quadrature = QuadratureSpec{};
  m.output = "out.csv";
  const auto j = m.to_json();
  for (const char* key : {"id", "command", "case", "grids", "integrator", "quadrature", "output", "version",
                          "wall_clock_seconds", "started_at"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["case"]["axes"], "xz");
  EXPECT_EQ(j["integrator"]["dt"], "auto");
  std::set<std::string> ids;
  for (int i = 0; i < 100; ++i) ids.insert(ex::new_run_id());
  EXPECT_EQ(ids.size(), 100u);
  EXPECT_EQ(ex::manifest_path("a/b.csv"), "a/b.csv.manifest.json");
}

TEST(Files, WriteFailureIsReported) {
  EXPECT_THROW(ex::write_text_file("/nonexistent-dir/x.csv", "x"), ex::UsageError);
}
