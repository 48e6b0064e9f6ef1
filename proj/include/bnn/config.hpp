#pragma once

/**
 * @file config.hpp
 * @brief INI run configurations for the normalize and beltrami commands.
 *
 * Grammar: `key = value` lines grouped under `[section]` headers, `;` or `#`
 * comments. Unknown sections or keys are rejected.
 */

#include <map>
#include <set>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bnn/normalform.hpp"

namespace bnn {

/// Malformed or unreadable configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

using Tree = boost::property_tree::ptree;

inline Tree read_ini(const std::string& path) {
  Tree t;
  try {
    boost::property_tree::ini_parser::read_ini(path, t);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  return t;
}

inline void require_keys(const Tree& t, const std::map<std::string, std::set<std::string>>& allowed) {
  for (const auto& [section, body] : t) {
    const auto it = allowed.find(section);
    if (it == allowed.end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("key '" + section + "' outside of a section");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }
}

template <class T>
T get(const Tree& t, const std::string& path, T fallback) {
  const auto v = t.get_optional<std::string>(path);
  if (!v) return fallback;
  const auto parsed = t.get_optional<T>(path);
  if (!parsed) throw ConfigError("cannot parse '" + path + "' from \"" + *v + "\"");
  return *parsed;
}

inline void require_positive(double v, const std::string& name) {
  if (!(v > 0.0)) throw ConfigError(name + " must be > 0");
}

inline void require_grid(int n) {
  if (n < 64 || n > 1024 || (n & (n - 1)) != 0) {
    throw ConfigError("grid size must be a power of two between 64 and 1024");
  }
}

inline FlatProfile parse_profile(const std::string& s) {
  if (s == "gauss_flat") return FlatProfile::gauss_flat;
  if (s == "bump_flat") return FlatProfile::bump_flat;
  throw ConfigError("unknown gamma profile '" + s + "'");
}

}  // namespace detail

struct GammaSpec {
  FlatProfile profile = FlatProfile::gauss_flat;
  double amplitude = 0.1;
  /// Half-width of the square support.
  double support = 2.0;

  ScalarField field() const { return make_flat_field(amplitude, profile, Rectangle::square(support)); }
};

struct NormalizeRun {
  GammaSpec gamma;
  NormalizeConfig pipeline;
};

inline NormalizeRun parse_normalize_config(const std::string& path) {
  const auto t = detail::read_ini(path);
  detail::require_keys(t, {{"gamma", {"profile", "amplitude", "support"}},
                           {"grid", {"n", "half_width"}},
                           {"pipeline", {"cutoff_width", "tol", "max_iter", "tol_accept", "bholo_accept", "strip",
                                         "localize_inner", "localize_outer"}},
                           {"samples", {"seed", "count"}}});
  NormalizeRun run;
  auto& g = run.gamma;
  auto& c = run.pipeline;
  g.profile = detail::parse_profile(detail::get<std::string>(t, "gamma.profile", "gauss_flat"));
  g.amplitude = detail::get(t, "gamma.amplitude", g.amplitude);
  g.support = detail::get(t, "gamma.support", g.support);
  c.grid = detail::get(t, "grid.n", c.grid);
  c.solver_half_width = detail::get(t, "grid.half_width", c.solver_half_width);
  c.cutoff_width = detail::get(t, "pipeline.cutoff_width", c.cutoff_width);
  c.tol = detail::get(t, "pipeline.tol", c.tol);
  c.max_iter = detail::get(t, "pipeline.max_iter", c.max_iter);
  c.tol_accept = detail::get(t, "pipeline.tol_accept", c.tol_accept);
  c.bholo_accept = detail::get(t, "pipeline.bholo_accept", c.bholo_accept);
  c.strip = detail::get(t, "pipeline.strip", c.strip);
  c.localize_inner = detail::get(t, "pipeline.localize_inner", c.localize_inner);
  c.localize_outer = detail::get(t, "pipeline.localize_outer", c.localize_outer);
  c.seed = detail::get<std::uint64_t>(t, "samples.seed", c.seed);
  c.n_samples = detail::get<std::size_t>(t, "samples.count", c.n_samples);

  if (g.amplitude < 0.0) throw ConfigError("gamma.amplitude must be >= 0");
  detail::require_positive(g.support, "gamma.support");
  detail::require_grid(c.grid);
  for (auto [v, name] : {std::pair{c.solver_half_width, "grid.half_width"}, {c.cutoff_width, "pipeline.cutoff_width"},
                         {c.tol, "pipeline.tol"}, {c.tol_accept, "pipeline.tol_accept"},
                         {c.bholo_accept, "pipeline.bholo_accept"}, {c.strip, "pipeline.strip"}}) {
    detail::require_positive(v, name);
  }
  if (!(0.0 < c.localize_inner && c.localize_inner < c.localize_outer)) {
    throw ConfigError("pipeline.localize_inner must lie in (0, localize_outer)");
  }
  if (c.max_iter < 1) throw ConfigError("pipeline.max_iter must be >= 1");
  if (c.n_samples < 1) throw ConfigError("samples.count must be >= 1");
  return run;
}

enum class NuKind { zero, constant, bump };

struct BeltramiRun {
  NuKind kind = NuKind::bump;
  /// Constant value (constant) or amplitude (bump).
  double value = 0.1;
  /// Support radius of the bump.
  double radius = 0.75;
  int grid = 256;
  double half_width = 1.0;
  double tol = 1e-8;
  int max_iter = 200;
  /// Acceptance for the closed-form comparison and the residual.
  double tol_accept = 1e-6;

  BeltramiProblem problem() const {
    const Rectangle rect = Rectangle::square(half_width);
    switch (kind) {
      case NuKind::zero:
        return BeltramiProblem::sample(ScalarField::zero(), grid, rect);
      case NuKind::constant:
        return BeltramiProblem::sample(ScalarField::constant(value), grid, rect);
      case NuKind::bump:
        break;
    }
    return BeltramiProblem::sample(flat_bump_coefficient(value, radius), grid, rect);
  }

  BeltramiOptions options() const {
    // A constant coefficient is neither compactly supported nor flat.
    const bool manufactured = kind == NuKind::constant;
    return {.max_iter = max_iter, .tol = tol, .require_support = !manufactured, .require_flat = !manufactured};
  }
};

inline BeltramiRun parse_beltrami_config(const std::string& path) {
  const auto t = detail::read_ini(path);
  detail::require_keys(t, {{"problem", {"nu", "value", "radius"}},
                           {"grid", {"n", "half_width"}},
                           {"solver", {"tol", "max_iter", "tol_accept"}}});
  BeltramiRun run;
  const auto kind = detail::get<std::string>(t, "problem.nu", "bump");
  if (kind == "zero") {
    run.kind = NuKind::zero;
  } else if (kind == "constant") {
    run.kind = NuKind::constant;
  } else if (kind == "bump") {
    run.kind = NuKind::bump;
  } else {
    throw ConfigError("unknown problem.nu '" + kind + "'");
  }
  run.value = detail::get(t, "problem.value", run.value);
  run.radius = detail::get(t, "problem.radius", run.radius);
  run.grid = detail::get(t, "grid.n", run.grid);
  run.half_width = detail::get(t, "grid.half_width", run.half_width);
  run.tol = detail::get(t, "solver.tol", run.tol);
  run.max_iter = detail::get(t, "solver.max_iter", run.max_iter);
  run.tol_accept = detail::get(t, "solver.tol_accept", run.tol_accept);

  detail::require_grid(run.grid);
  for (auto [v, name] : {std::pair{run.half_width, "grid.half_width"}, {run.tol, "solver.tol"},
                         {run.tol_accept, "solver.tol_accept"}, {run.radius, "problem.radius"}}) {
    detail::require_positive(v, name);
  }
  if (run.max_iter < 1) throw ConfigError("solver.max_iter must be >= 1");
  return run;
}

}  // namespace bnn
