#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "critshape/geometry.hpp"

namespace critshape {

inline constexpr const char* kVersion = "0.3.1";

struct HenonParams {
  double alpha = 1.0;
  double p = 3.0;
  double epsilon = 0.01;
  std::string profile = "(1-x^2-y^2)*(1+3*x^2)";  // positive inside, zero on the boundary
};

struct ScenarioConfig {
  std::string id;
  std::optional<StarDomain> domain;  // overrides the preset domain
  std::string field = "1";           // f for Poisson scenarios and maps
  std::string g = "exp(u)";          // nonlinearity
  double lambda = 1.0;
  int steps = 10;
  double h = 0.05;
  bool refine = false;  // also solve at h / 2 and compare
  std::vector<double> epsilons;
  ChiProfile profile;
  HenonParams henon;
  std::uint64_t seed = 0;
  int n_interior = 2048;
  int n_boundary = 1024;
  double hp2_tol = 1e-8;
  double hessian_tol = 1e-6;
  int contour_levels = 12;
  std::string out;       // JSON report path, empty for none
  std::string contours;  // CSV path, empty for none
};

struct ScenarioReport {
  std::string id;
  std::string verdict;  // pass, fail, pass-as-counterexample or error
  bool pass = false;
  nlohmann::json report;   // deterministic for a given config
  nlohmann::json timings;  // seconds per stage
};

struct ScenarioInfo {
  std::string id;
  std::string summary;
};

std::vector<ScenarioInfo> scenario_catalog();
bool is_scenario(const std::string& id);

// Preset for `id`; throws InvalidArgument for unknown ids.
ScenarioConfig default_config(const std::string& id);

// Preset named by j["id"] (or `id` if given) with the keys present in j
// overriding it. Unknown keys are rejected.
ScenarioConfig config_from_json(const nlohmann::json& j, const std::string& id = "");
void to_json(nlohmann::json& j, const ScenarioConfig& c);

// Runs the preset pipeline. Errors from any stage end up in the report with
// verdict "error"; nothing is thrown for a valid config. Writes the JSON
// report and contour CSV if the config names paths.
ScenarioReport run_scenario(const ScenarioConfig& config);

// The report plus timings, as written to disk.
nlohmann::json full_report(const ScenarioReport& r);

}  // namespace critshape
