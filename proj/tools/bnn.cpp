// bnn: verification suite, normalization pipeline, Beltrami solver and flow plots.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bnn/commands.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

int emit(const bnn::Report& r, const std::string& path) {
  try {
    if (!path.empty()) r.write(path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  std::cout << r.dump();
  return r.pass() ? kPass : kFail;
}

void summarize(const bnn::Report& r) {
  std::size_t passed = 0;
  for (const auto& c : r.checks) {
    passed += c.pass;
    if (!c.pass) std::cerr << "FAIL " << c.id << " residual " << c.residual << " > " << c.tolerance << '\n';
  }
  std::cerr << r.suite << ": " << passed << "/" << r.checks.size() << " checks passed\n";
}

std::string stem_of(const std::string& out) {
  std::filesystem::path p(out);
  if (p.extension() == ".svg" || p.extension() == ".csv") p.replace_extension();
  return p.string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"b-Newlander-Nirenberg normalization and verification"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "run the identity verification suite");
  std::string verify_report;
  std::uint64_t seed = 1;
  bool inject = false;
  verify->add_option("--report", verify_report, "write the JSON report to this path");
  verify->add_option("--seed", seed, "seed for sample points");
  verify->add_flag("--inject-fault", inject, "flip the orientation of g in the pushforward checks");

  auto* normalize = app.add_subcommand("normalize", "normalize a deformed b-frame");
  std::string normalize_config, dump_phi, normalize_report;
  normalize->add_option("--config", normalize_config, "INI configuration")->required();
  normalize->add_option("--dump-phi", dump_phi, "write Phi on a grid as CSV");
  normalize->add_option("--report", normalize_report, "write the JSON report to this path");

  auto* beltrami = app.add_subcommand("beltrami", "solve a configured Beltrami problem");
  std::string beltrami_config, beltrami_report;
  beltrami->add_option("--config", beltrami_config, "INI configuration")->required();
  beltrami->add_option("--report", beltrami_report, "write the JSON report to this path");

  auto* flows = app.add_subcommand("flows", "plot JX for z^k d/dz with integral curves");
  int k = 0;
  std::string out;
  flows->add_option("--k", k, "exponent k in [1, 8]")->required();
  flows->add_option("--out", out, "output stem; writes STEM.svg and STEM.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  try {
    if (*verify) {
      const bnn::Report r = bnn::run_verify({.seed = seed, .inject_fault = inject});
      summarize(r);
      return emit(r, verify_report);
    }

    if (*normalize) {
      bnn::NormalizeRun run;
      try {
        run = bnn::parse_normalize_config(normalize_config);
      } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsage;
      }
      const bnn::NormalizeOutcome outcome = bnn::run_normalize(run);
      if (!outcome.failed_stage.empty()) {
        std::cerr << "pipeline failed in stage " << outcome.report.details["error"].get<std::string>() << '\n';
      }
      if (!dump_phi.empty() && outcome.result) {
        std::ofstream csv(dump_phi);
        if (!csv) {
          std::cerr << "error: cannot open " << dump_phi << '\n';
          return kUsage;
        }
        bnn::write_phi_csv(csv, outcome.result->phi, outcome.result->report.domain_used);
        if (!csv) return kUsage;
      }
      summarize(outcome.report);
      return emit(outcome.report, normalize_report);
    }

    if (*beltrami) {
      bnn::BeltramiRun run;
      try {
        run = bnn::parse_beltrami_config(beltrami_config);
      } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsage;
      }
      bnn::Report r;
      try {
        r = bnn::run_beltrami(run);
      } catch (const bnn::EllipticityError& e) {
        std::cerr << "ellipticity error: " << e.what() << '\n';
        return kFail;
      } catch (const bnn::PreconditionError& e) {
        std::cerr << "precondition error: " << e.what() << '\n';
        return kFail;
      }
      summarize(r);
      return emit(r, beltrami_report);
    }

    if (*flows) {
      if (k < 1 || k > 8) {
        std::cerr << "error: --k must lie in [1, 8]\n";
        return kUsage;
      }
      const std::string stem = stem_of(out);
      const auto curves = bnn::figure_curves(k);
      std::ofstream svg(stem + ".svg"), csv(stem + ".csv");
      if (!svg || !csv) {
        std::cerr << "error: cannot open output files for stem " << stem << '\n';
        return kUsage;
      }
      bnn::write_flow_svg(svg, k, curves);
      bnn::write_curves_csv(csv, curves);
      if (!svg || !csv) return kUsage;
      std::cerr << "wrote " << stem << ".svg and " << stem << ".csv\n";
      return kPass;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}
