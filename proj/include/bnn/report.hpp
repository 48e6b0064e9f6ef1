#pragma once

/**
 * @file report.hpp
 * @brief Check records and the JSON report document.
 */

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace bnn {

inline constexpr const char* kVersion = "0.1.0";

struct Check {
  std::string id;
  std::string paper_location;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  static Check make(std::string id, std::string location, double residual, double tolerance) {
    return {std::move(id), std::move(location), residual, tolerance, residual <= tolerance};
  }
};

struct Report {
  std::string suite;
  std::vector<Check> checks;
  int grid = 0;
  std::uint64_t seed = 0;
  /// Command-specific extras, written under "details".
  nlohmann::ordered_json details = nlohmann::ordered_json::object();

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }

  void add(Check c) { checks.push_back(std::move(c)); }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
      nlohmann::ordered_json r;
      r["id"] = c.id;
      r["paper_location"] = c.paper_location;
      // NaN and infinities are not JSON numbers.
      if (std::isfinite(c.residual)) {
        r["residual"] = c.residual;
      } else {
        r["residual"] = nullptr;
      }
      r["tolerance"] = c.tolerance;
      r["pass"] = c.pass;
      j["checks"].push_back(r);
    }
    j["env"] = {{"grid", grid}, {"seed", seed}, {"version", kVersion}};
    j["pass"] = pass();
    if (!details.empty()) j["details"] = details;
    return j;
  }

  std::string dump() const { return to_json().dump(2) + "\n"; }

  /// Throws std::runtime_error on I/O failure.
  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open report file " + path);
    out << dump();
    if (!out) throw std::runtime_error("cannot write report file " + path);
  }
};

/// Structural validation of a report document; returns an empty string when valid.
inline std::string validate_report(const nlohmann::json& j) {
  if (!j.is_object()) return "report is not an object";
  if (!j.contains("suite") || !j["suite"].is_string()) return "missing string 'suite'";
  if (!j.contains("pass") || !j["pass"].is_boolean()) return "missing boolean 'pass'";
  if (!j.contains("env") || !j["env"].is_object()) return "missing object 'env'";
  for (const char* k : {"grid", "seed"})
    if (!j["env"].contains(k) || !j["env"][k].is_number_integer()) return std::string("env.") + k + " is not an integer";
  if (!j["env"].contains("version") || !j["env"]["version"].is_string()) return "env.version is not a string";
  if (!j.contains("checks") || !j["checks"].is_array()) return "missing array 'checks'";
  bool all = true;
  for (const auto& c : j["checks"]) {
    if (!c.is_object()) return "check is not an object";
    for (const char* k : {"id", "paper_location"})
      if (!c.contains(k) || !c[k].is_string()) return std::string("check field '") + k + "' is not a string";
    if (!c.contains("residual") || !(c["residual"].is_number() || c["residual"].is_null()))
      return "check residual is not a number";
    if (!c.contains("tolerance") || !c["tolerance"].is_number()) return "check tolerance is not a number";
    if (!c.contains("pass") || !c["pass"].is_boolean()) return "check pass is not a boolean";
    all = all && c["pass"].get<bool>();
  }
  if (all != j["pass"].get<bool>()) return "overall pass disagrees with the checks";
  return {};
}

}  // namespace bnn
