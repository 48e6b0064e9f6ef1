// Acceptance run: one PASS/FAIL line per criterion. Usage: acceptance PATH_TO_BNN_CLI

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <sys/wait.h>

#include "bnn/commands.hpp"

using namespace bnn;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    note << (ok ? "" : "[x] ") << what << "; ";
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

Outcome ac1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto samples = random_points_off_axis(0.1, 2.0, 1.3, 200, 2024);
  const auto tests = polynomial_tests();
  const ScalarField X = ScalarField::coord_x(), Y = ScalarField::coord_y();
  using namespace frames;
  const std::pair<VectorField, VectorField> cases[] = {
      {x_d_x(), {X, Y}}, {d_y(), {-Y, X}}, {b_d_zbar(), zbar() * d_zbar()}, {b_d_z(), z() * d_z()}};
  const char* names[] = {"x_dx", "dy", "b_dzbar", "b_dz"};
  for (int i = 0; i < 4; ++i) {
    const double r = relatedness_residual(polar_map(), cases[i].first, cases[i].second, tests, samples).max_abs;
    o.require(r <= 1e-9, std::string(names[i]) + " " + fmt(r));
  }
  const double t = seconds_since(t0);
  o.require(t < 2.0, "time " + fmt(t) + "s");
  return o;
}

Outcome ac2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const ScalarField X = ScalarField::coord_x(), Y = ScalarField::coord_y();
  const VectorField l = detail::tanex_frame();
  const double b = bholo_residual(l, X + I * X * Y, random_points(Rectangle::square(2.0), 200, 5)).max_abs;
  o.require(b <= 1e-12, "bholo " + fmt(b));
  const auto tests = polynomial_tests();
  const double r = relatedness_residual(model_G(), frames::b_d_zbar(), l, tests,
                                        random_points_off_axis(0.1, 2.0, 1.3, 200, 6))
                       .max_abs;
  o.require(r <= 1e-9, "G-relatedness " + fmt(r));
  const double t = seconds_since(t0);
  o.require(t < 1.0, "time " + fmt(t) + "s");
  return o;
}

Outcome ac3() {
  Outcome o;
  const ScalarField g = polar_function();
  const double b = bholo_residual(BFrame::standard(), g, random_points(Rectangle(-2, 2, -4, 4), 200, 7)).max_abs;
  o.require(b <= 1e-12, "x e^{iy} " + fmt(b));
  const ScalarField f = g.map([](const Jet& u) { return exp(-1.0 * reciprocal(u)); });
  const double e = bholo_residual(BFrame::standard(), f, random_points(Rectangle(0.1, 2, -3, 3), 200, 8)).max_abs;
  o.require(e <= 1e-10, "exp(-1/g) " + fmt(e));
  return o;
}

Outcome ac4() {
  Outcome o;
  auto value = [](const Report& r, const std::string& id) {
    for (const auto& c : r.checks)
      if (c.id == id) return c;
    throw std::runtime_error("missing check " + id);
  };
  BeltramiRun zero;
  zero.kind = NuKind::zero;
  const Report rz = run_beltrami(zero);
  o.require(value(rz, "beltrami.closed_form").residual <= 1e-12,
            "nu=0 " + fmt(value(rz, "beltrami.closed_form").residual));

  const auto t0 = std::chrono::steady_clock::now();
  BeltramiRun constant;
  constant.kind = NuKind::constant;
  constant.value = 0.2;
  const Report rc = run_beltrami(constant);
  const double t = seconds_since(t0);
  const double ec = value(rc, "beltrami.closed_form").residual;
  o.require(ec <= 1e-6, "nu=0.2 closed form " + fmt(ec));
  o.require(t < 10.0, "constant solve " + fmt(t) + "s");

  BeltramiRun bump;
  bump.kind = NuKind::bump;
  bump.value = 0.1;
  const Report rb = run_beltrami(bump);
  const Check res = value(rb, "beltrami.residual"), ratio = value(rb, "beltrami.contraction");
  o.require(res.residual <= 1e-6, "bump residual " + fmt(res.residual));
  o.require(ratio.pass, "contraction ratio " + fmt(ratio.residual) + " <= " + fmt(ratio.tolerance));
  return o;
}

Outcome ac5() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  NormalizeRun run;
  run.gamma.amplitude = 0.1;
  const NormalizeOutcome n = run_normalize(run);
  const double t = seconds_since(t0);
  o.require(n.result.has_value(), "pipeline completes");
  if (n.result) {
    const NormalFormReport& r = n.result->report;
    o.require(r.colinearity.max_abs <= 1e-4, "colinearity " + fmt(r.colinearity.max_abs));
    o.require(r.jacobian_defect() <= 1e-6, "J_F(0) " + fmt(r.jacobian_defect()));
    o.require(r.z_defect <= 1e-8, "Z " + fmt(r.z_defect));
  }
  o.require(t < 60.0, "time " + fmt(t) + "s");

  NormalizeRun flat;
  flat.gamma.amplitude = 0.0;
  const NormalizeOutcome id = run_normalize(flat);
  bool identity = false;
  for (const auto& c : id.report.checks)
    if (c.id == "normalize.identity") {
      identity = c.pass;
      o.note << "identity " << fmt(c.residual) << "; ";
    }
  o.require(identity, "amplitude 0 gives the identity");
  return o;
}

Outcome ac6() {
  Outcome o;
  double ode = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const cplx z0 = k == 1 ? 1.0 : 0.5;
    ode = std::max({ode, flow_ode_residual(k, 0.0, 0.1, z0).max_abs, flow_ode_residual(k, 0.0, cplx(0, 0.1), z0).max_abs});
  }
  o.require(ode <= 1e-8, "flow ODE " + fmt(ode));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.2, 0.2), zr(-1.0, 1.0);
  double semi = 0.0;
  for (int k = 1; k <= 4; ++k)
    for (int i = 0; i < 200; ++i) {
      const cplx w(u(rng), u(rng)), w2(u(rng), u(rng)), z(zr(rng), zr(rng));
      if (const auto d = semigroup_defect(k, w, w2, z)) semi = std::max(semi, *d);
    }
  o.require(semi <= 1e-9, "semigroup " + fmt(semi));

  const auto samples = random_points(Rectangle::square(1.0), 100, 12);
  for (int k = 1; k <= 4; ++k) {
    const SignDetermination d = determine_gk_sign(k, samples);
    const double r = std::min(d.residual_plus, d.residual_minus);
    o.require(d.passing_sign != 0 && r <= 1e-8,
              "g_" + std::to_string(k) + " sign " + (d.passing_sign > 0 ? "+" : d.passing_sign < 0 ? "-" : "none") +
                  " " + fmt(r));
  }
  const std::vector<double> starts{-1.0, -0.5, -0.25, 0.25, 0.5, 1.0};
  for (int k = 2; k <= 4; ++k) {
    const CompletenessResult c = jx_completeness(k, starts, 10.0);
    o.require(c.complete && c.endpoint_error <= 1e-6, "JX complete k=" + std::to_string(k));
  }
  return o;
}

int run_cli(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

Outcome ac7(const std::string& cli) {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / ("bnn_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto report = (dir / "verify.json").string();
  const int rc = run_cli("\"" + cli + "\" verify --report \"" + report + "\" > /dev/null 2>&1");
  o.require(rc == 0, "verify exit " + std::to_string(rc));
  try {
    std::ifstream in(report);
    const auto j = nlohmann::json::parse(in);
    const std::string err = validate_report(j);
    o.require(err.empty(), err.empty() ? "schema valid" : err);
    std::size_t passing = 0;
    for (const auto& c : j["checks"]) passing += c["pass"].get<bool>();
    o.require(passing >= 20, std::to_string(passing) + " passing records");
  } catch (const std::exception& e) {
    o.require(false, std::string("report unreadable: ") + e.what());
  }
  const int fault = run_cli("\"" + cli + "\" verify --inject-fault > /dev/null 2>&1");
  o.require(fault == 1, "fault injection exit " + std::to_string(fault));
  std::filesystem::remove_all(dir);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance PATH_TO_BNN_CLI\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"AC1 pushforward identities", ac1},
      {"AC2 tangent-frame example", ac2},
      {"AC3 basic b-holomorphic examples", ac3},
      {"AC4 Beltrami solver", ac4},
      {"AC5 end-to-end normal form", ac5},
      {"AC6 flows and g_k", ac6},
      {"AC7 CLI verify and fault injection", [&] { return ac7(cli); }},
  };
  bool all = true;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " -- " << o.note.str() << std::endl;
  }
  return all ? 0 : 1;
}
