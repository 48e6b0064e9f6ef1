#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "bnn/commands.hpp"

using namespace bnn;

namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bnn_report_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

TEST(Report, OverallPassIsTheConjunction) {
  Report r;
  r.suite = "t";
  EXPECT_TRUE(r.pass());
  r.add(Check::make("a", "somewhere", 1e-12, 1e-9));
  EXPECT_TRUE(r.pass());
  r.add(Check::make("b", "elsewhere", 1e-3, 1e-9));
  EXPECT_FALSE(r.pass());
  const auto j = nlohmann::json::parse(r.dump());
  EXPECT_EQ(validate_report(j), "");
  EXPECT_FALSE(j["pass"].get<bool>());
  EXPECT_EQ(j["checks"].size(), 2u);
}

TEST(Report, NanResidualIsNullAndFails) {
  const Check c = Check::make("n", "x", std::numeric_limits<double>::quiet_NaN(), 1.0);
  EXPECT_FALSE(c.pass);
  Report r;
  r.suite = "t";
  r.add(c);
  const auto j = nlohmann::json::parse(r.dump());
  EXPECT_TRUE(j["checks"][0]["residual"].is_null());
  EXPECT_EQ(validate_report(j), "");
}

TEST(Report, ValidationCatchesStructuralErrors) {
  Report r;
  r.suite = "t";
  r.add(Check::make("a", "x", 0.0, 1.0));
  auto j = nlohmann::json::parse(r.dump());
  EXPECT_EQ(validate_report(j), "");
  auto bad = j;
  bad["pass"] = false;
  EXPECT_NE(validate_report(bad), "");
  bad = j;
  bad["checks"][0].erase("tolerance");
  EXPECT_NE(validate_report(bad), "");
  bad = j;
  bad["env"].erase("seed");
  EXPECT_NE(validate_report(bad), "");
  EXPECT_NE(validate_report(nlohmann::json::array()), "");
}

TEST(Report, WriteFailureThrows) {
  Report r;
  EXPECT_THROW(r.write("/nonexistent-dir/for/sure/report.json"), std::runtime_error);
}

TEST(Verify, AllChecksPassWithDistinctIds) {
  const Report r = run_verify();
  EXPECT_GE(r.checks.size(), 20u);
  std::set<std::string> ids;
  for (const auto& c : r.checks) {
    EXPECT_TRUE(c.pass) << c.id << " residual " << c.residual;
    EXPECT_TRUE(ids.insert(c.id).second) << "duplicate id " << c.id;
    EXPECT_FALSE(c.paper_location.empty());
  }
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(validate_report(nlohmann::json::parse(r.dump())), "");
}

TEST(Verify, InjectedFaultBreaksThePushforwardChecks) {
  const Report r = run_verify({.seed = 1, .inject_fault = true});
  EXPECT_FALSE(r.pass());
  for (const auto& c : r.checks) {
    if (c.id == "pushforward.dy" || c.id == "pushforward.b_dzbar" || c.id == "pushforward.b_dz") {
      EXPECT_FALSE(c.pass) << c.id;
    }
  }
}

TEST(Verify, DeterministicForAFixedSeed) {
  EXPECT_EQ(run_verify({.seed = 3}).dump(), run_verify({.seed = 3}).dump());
}

TEST(Verify, RecordsTheGkSign) {
  const Report r = run_verify();
  int found = 0;
  for (const auto& c : r.checks) {
    if (c.id.rfind("gk.relatedness.", 0) == 0) {
      ++found;
      EXPECT_NE(c.id.find("sign_minus"), std::string::npos) << c.id;
    }
  }
  EXPECT_EQ(found, 4);
}

TEST_F(TempDir, NormalizeConfigRoundTrip) {
  const auto path = write("n.ini",
                          "[gamma]\nprofile = bump_flat\namplitude = 0.05\nsupport = 1.5\n"
                          "[grid]\nn = 128\nhalf_width = 2.5\n"
                          "[pipeline]\ntol = 1e-7\nstrip = 0.1\nlocalize_inner = 1.0\nlocalize_outer = 1.5\n"
                          "[samples]\nseed = 9\ncount = 50\n");
  const NormalizeRun run = parse_normalize_config(path);
  EXPECT_EQ(run.gamma.profile, FlatProfile::bump_flat);
  EXPECT_EQ(run.gamma.amplitude, 0.05);
  EXPECT_EQ(run.gamma.support, 1.5);
  EXPECT_EQ(run.pipeline.grid, 128);
  EXPECT_EQ(run.pipeline.solver_half_width, 2.5);
  EXPECT_EQ(run.pipeline.tol, 1e-7);
  EXPECT_EQ(run.pipeline.strip, 0.1);
  EXPECT_EQ(run.pipeline.seed, 9u);
  EXPECT_EQ(run.pipeline.n_samples, 50u);
  EXPECT_EQ(run.pipeline.tol_accept, 1e-4);  // default kept
}

TEST_F(TempDir, NormalizeConfigErrors) {
  const char* bad[] = {
      "[grid]\nn = 100\n",
      "[grid]\nn = 2048\n",
      "[pipeline]\ntol = 0\n",
      "[pipeline]\ntol_accept = -1e-4\n",
      "[gamma]\nprofile = wavy\n",
      "[gamma]\namplitude = -1\n",
      "[gamma]\ncolour = red\n",
      "[extra]\nkey = 1\n",
      "[grid]\nn = sixty-four\n",
      "[pipeline]\nlocalize_inner = 2.0\nlocalize_outer = 1.0\n",
  };
  int k = 0;
  for (const char* text : bad) {
    const auto path = write("bad" + std::to_string(k++) + ".ini", text);
    EXPECT_THROW(parse_normalize_config(path), ConfigError) << text;
  }
  EXPECT_THROW(parse_normalize_config((dir_ / "missing.ini").string()), ConfigError);
}

TEST_F(TempDir, BeltramiConfig) {
  const BeltramiRun run = parse_beltrami_config(write("b.ini", "[problem]\nnu = constant\nvalue = -0.2\n"));
  EXPECT_EQ(run.kind, NuKind::constant);
  EXPECT_EQ(run.value, -0.2);
  EXPECT_EQ(run.grid, 256);
  EXPECT_EQ(run.half_width, 1.0);
  EXPECT_FALSE(run.options().require_flat);
  EXPECT_THROW(parse_beltrami_config(write("c.ini", "[problem]\nnu = cubic\n")), ConfigError);
  EXPECT_THROW(parse_beltrami_config(write("d.ini", "[solver]\nmax_iter = 0\n")), ConfigError);
  EXPECT_THROW(parse_beltrami_config(write("e.ini", "[solver]\nspeed = 3\n")), ConfigError);
}

TEST(RunBeltrami, ConstantCasesOfBothSigns) {
  for (double c : {0.2, -0.2}) {
    BeltramiRun run;
    run.kind = NuKind::constant;
    run.value = c;
    run.grid = 128;
    const Report r = run_beltrami(run);
    EXPECT_TRUE(r.pass()) << r.dump();
  }
}

TEST(RunBeltrami, ZeroAndBump) {
  BeltramiRun zero;
  zero.kind = NuKind::zero;
  zero.grid = 64;
  EXPECT_TRUE(run_beltrami(zero).pass());
  BeltramiRun bump;
  const Report r = run_beltrami(bump);
  EXPECT_TRUE(r.pass()) << r.dump();
  EXPECT_TRUE(r.details["converged"].get<bool>());
}

TEST(Figure, CurvesStartOnTheAxisAndRestartTime) {
  const auto curves = figure_curves(2);
  ASSERT_EQ(curves.size(), 8u);
  for (const auto& c : curves) {
    EXPECT_EQ(c.samples.front().t, 0.0);
    EXPECT_EQ(c.samples.front().p.y, 0.0);
    EXPECT_EQ(c.samples.front().p.x, c.x0);
    const FlowResult exact = g_k(2, c.x0, c.samples.back().t);
    ASSERT_TRUE(exact.valid);
    EXPECT_LE(std::abs(cplx(c.samples.back().p.x, c.samples.back().p.y) - exact.endpoint), 1e-6);
  }
  std::ostringstream svg, csv;
  write_flow_svg(svg, 2, curves);
  write_curves_csv(csv, curves);
  EXPECT_EQ(svg.str().rfind("<svg", 0), 0u);
  EXPECT_NE(svg.str().find("</svg>"), std::string::npos);
  EXPECT_EQ(csv.str().rfind("t,x,y\n", 0), 0u);
}

}  // namespace
