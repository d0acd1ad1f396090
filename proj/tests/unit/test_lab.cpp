#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "wgstark/errors.hpp"
#include "wgstark/lab/commands.hpp"
#include "wgstark/lab/config.hpp"
#include "wgstark/lab/output.hpp"
#include "wgstark/lab/pipeline.hpp"

using namespace wgstark;
using namespace wgstark::lab;

namespace {

std::string error_path(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<accepted>";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wgstark_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::vector<SweepRecord> synthetic_widths(double c1, double c2, double noise, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(-noise, noise);
  std::vector<SweepRecord> out;
  for (double F : {0.004, 0.003, 0.00225, 0.0017, 0.00125, 0.00095}) {
    SweepRecord r;
    r.F = F;
    r.re = 9.8;
    r.im = -c1 * std::exp(-c2 / F) * (1.0 + jitter(rng));
    r.ok = true;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(Config, EmptyDocumentGivesDefaults) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.geometry.alpha, -0.8);
  EXPECT_EQ(c.geometry.n, 2);
  EXPECT_EQ(c.field.F, 0.002);
  EXPECT_EQ(c.field.eta, 0.3);
  EXPECT_EQ(c.distortion.beta, 0.008);
  EXPECT_FALSE(c.grid.L.has_value());
  EXPECT_FALSE(c.grid.Ns.has_value());
  EXPECT_EQ(c.grid.Nu, 25);
  EXPECT_EQ(c.solver.method, "shift-invert");
}

TEST(Config, OverridesAreYamlScalars) {
  const RunConfig c = parse_config("field:\n  F: 0.01\n", {"field.F=0.02", "grid.L=30", "distortion.beta_list=[0.01, 0.02]"});
  EXPECT_EQ(c.field.F, 0.02);
  ASSERT_TRUE(c.grid.L.has_value());
  EXPECT_EQ(*c.grid.L, 30.0);
  ASSERT_EQ(c.distortion.beta_list.size(), 2u);
  EXPECT_EQ(c.distortion.beta_list[1], 0.02);
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_EQ(error_path("grid:\n  Nx: 3\n"), "grid.Nx");
  EXPECT_EQ(error_path("", {"solver.method=qr"}), "solver.method");
  EXPECT_EQ(error_path("", {"grid.Nu=0"}), "grid.Nu");
  EXPECT_EQ(error_path("field: [1, 2]\n"), "field");
}

TEST(Config, RejectsBoundaryDirections) {
  EXPECT_THROW(parse_config("", {"field.eta=1.57079632"}), ConfigError);
  // eta - alpha0 = pi/2 with alpha0 of the default curve
  const double eta = -1.7771531752633465 + 1.5707963267948966;
  std::ostringstream o;
  o.precision(17);
  o << "field.eta=" << eta;
  EXPECT_THROW(parse_config("", {o.str()}), ConfigError);
  EXPECT_NO_THROW(parse_config("", {"field.eta=1.5"}));
}

TEST(Config, RejectsFailedCurvatureGate) {
  try {
    parse_config("", {"geometry.model.alpha=-1.2"});
    FAIL() << "accepted d sup|gamma| >= 1";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("h1"), std::string::npos) << e.what();
  }
}

TEST(Config, YamlEchoRoundTrips) {
  const RunConfig c = parse_config("", {"field.F=0.0031", "grid.Ns=401"});
  const RunConfig back = parse_config(c.to_yaml());
  EXPECT_EQ(back.field.F, 0.0031);
  ASSERT_TRUE(back.grid.Ns.has_value());
  EXPECT_EQ(*back.grid.Ns, 401);
  EXPECT_FALSE(back.grid.L.has_value());
  EXPECT_EQ(back.to_yaml(), c.to_yaml());
}

TEST(WidthFit, RecoversExactLaw) {
  const WidthFit fit = fit_width(synthetic_widths(1.0, 0.003, 0.0, 1));
  EXPECT_NEAR(fit.c1, 1.0, 1e-10);
  EXPECT_NEAR(fit.c2, 0.003, 1e-13);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_EQ(fit.used, 6u);
  EXPECT_TRUE(fit.confirms_exponential_law());
}

TEST(WidthFit, ToleratesNoise) {
  const WidthFit fit = fit_width(synthetic_widths(0.5, 0.01, 0.05, 20240611));
  EXPECT_NEAR(fit.c2, 0.01, 1e-3);
  EXPECT_GE(fit.r_squared, 0.98);
}

TEST(WidthFit, SkipsFailedAndPositiveRecords) {
  auto records = synthetic_widths(1.0, 0.003, 0.0, 1);
  records[0].im = 1e-4;
  records[1].ok = false;
  const WidthFit fit = fit_width(records);
  EXPECT_EQ(fit.used, 4u);
  EXPECT_NEAR(fit.c2, 0.003, 1e-12);
  records[2].im = 0.0;
  EXPECT_THROW(fit_width(records), InvalidArgument);
}

TEST(Output, DoublesRoundTrip) {
  for (double v : {0.1, 9.8193041730339026, -9.5771857952449077e-05, 1e300}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Output, GitBlobId) {
  EXPECT_EQ(git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST(Output, CsvLayout) {
  CsvTable t({"F", "n", "tag"});
  t.row().add(0.5).add(3).add(std::string("x"));
  EXPECT_EQ(t.str(), "F,n,tag\n0.5,3,x\n");
}

TEST(Output, SvgIsStandalone) {
  PlotSpec spec{"t", "x", "y", {{"a", {0.0, 1.0, 2.0}, {1.0, 4.0, 9.0}, true}}};
  const std::string svg = render_svg(spec);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
}

TEST(Dispatch, KeepsInputOrder) {
  std::vector<int> jobs(37);
  for (int i = 0; i < 37; ++i) jobs[i] = i;
  std::vector<std::function<int()>> tasks;
  std::atomic<int> calls{0};
  for (int j : jobs) tasks.push_back([j, &calls] { ++calls; return j * j; });
  const auto out = dispatch<int>(tasks, 4);
  ASSERT_EQ(out.size(), 37u);
  for (int i = 0; i < 37; ++i) EXPECT_EQ(out[i], i * i);
  EXPECT_EQ(calls.load(), 37);
}

TEST(Commands, ModesIsReproducible) {
  const RunConfig c = parse_config("", {"grid.Nu=10"});
  const auto a = fresh_dir("modes_a");
  const auto b = fresh_dir("modes_b");
  ASSERT_EQ(run_command(Command::Modes, c, a).exit_code, kExitOk);
  ASSERT_EQ(run_command(Command::Modes, c, b).exit_code, kExitOk);
  for (const char* f : {"modes.csv", "modes.svg"}) {
    ASSERT_TRUE(std::filesystem::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const std::string manifest = slurp(a / "manifest.yaml");
  EXPECT_NE(manifest.find(git_blob_sha1(slurp(a / "modes.csv"))), std::string::npos);
  EXPECT_NE(manifest.find("status: ok"), std::string::npos) << manifest;
}

TEST(Commands, ConfiningRejectsResonantRegime) {
  const auto dir = fresh_dir("confining");
  const RunOutcome out = run_command(Command::Confining, parse_config(""), dir);
  EXPECT_EQ(out.exit_code, kExitValidation);
  const std::string manifest = slurp(dir / "manifest.yaml");
  EXPECT_NE(manifest.find("kind: validation"), std::string::npos) << manifest;
  EXPECT_NE(manifest.find("Confining regime"), std::string::npos) << manifest;
}

TEST(Commands, NamesRoundTrip) {
  for (Command c : {Command::Check, Command::Modes, Command::Bound, Command::Resonance, Command::SweepTheta,
                    Command::SweepField, Command::Confining}) {
    EXPECT_EQ(parse_command(to_string(c)), c);
  }
  EXPECT_FALSE(parse_command("spectrum").has_value());
}
