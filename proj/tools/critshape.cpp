// critshape command line front end.
//
// Exit codes: 0 pass, 1 verdict fail, 2 execution error.

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>

#include "CLI11.hpp"

#include <nlohmann/json.hpp>

#include "critshape/conformal.hpp"
#include "critshape/contour.hpp"
#include "critshape/error.hpp"
#include "critshape/hypotheses.hpp"
#include "critshape/morse.hpp"
#include "critshape/scenarios.hpp"

using namespace critshape;
using nlohmann::json;

namespace {

enum Exit { kPass = 0, kFail = 1, kError = 2 };

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
}

// --config is read before CLI11 parses, so its values act as defaults that
// explicit flags override.
std::optional<std::string> config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return argv[i + 1];
    if (std::strncmp(argv[i], "--config=", 9) == 0) return argv[i] + 9;
  }
  return std::nullopt;
}

template <class T>
void preset(const json& cfg, const char* key, T& v) {
  if (!cfg.contains(key)) return;
  try {
    v = cfg[key].get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config key '") + key + "': " + e.what());
  }
}

struct DomainArg {
  std::string path;
  std::optional<StarDomain> inline_domain;

  // file, then inline config object, then the unit disk
  StarDomain get() const {
    if (!path.empty()) return load_domain(path);
    return inline_domain.value_or(StarDomain{});
  }
  void preset_from(const json& cfg, const char* key) {
    if (!cfg.contains(key)) return;
    if (cfg[key].is_string())
      path = cfg[key].get<std::string>();
    else
      inline_domain = cfg[key].get<StarDomain>();
  }
};

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + out);
  f << j.dump(2) << '\n';
}

void write_contours(const SolutionField& s, const std::string& path, int levels) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  write_contour_csv(f, *s.mesh, s.values, default_levels(s.values, levels));
}

void write_family_csv(const json& family, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  f.precision(12);
  f << "epsilon,ok,point,x,y,type,determinant,mu1,distance_to_limit,norm_of_location,sup0,sup1,sup2\n";
  for (const auto& e : family["entries"]) {
    const double eps = e["epsilon"];
    if (!e["ok"].get<bool>()) {
      f << eps << ",0,,,,,,,,,,,\n";
      continue;
    }
    int k = 0;
    for (const auto& p : e["critical_points"]) {
      f << eps << ",1," << k++ << ',' << p["x"].get<double>() << ',' << p["y"].get<double>() << ','
        << p["type"].get<std::string>() << ',' << p["determinant"].get<double>() << ',' << e["mu1"].get<double>()
        << ',' << e["distance_to_limit"].get<double>() << ',' << e["norm_of_location"].get<double>();
      for (int s = 0; s < 3; ++s) f << ',' << e["sup_norms"][s].get<double>();
      f << '\n';
    }
  }
}

std::string csv_path_for(const std::string& out) {
  const auto dot = out.rfind('.');
  const auto slash = out.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return out + ".csv";
  return out.substr(0, dot) + ".csv";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical points of Poisson and semilinear problems on planar star-shaped domains"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();

  std::string out, config;
  std::uint64_t seed = 0;
  app.add_option("--out", out, "Write the JSON result here instead of stdout");
  app.add_option("--seed", seed, "Offset into the Halton sample sequence");
  app.add_option("--config", config, "JSON file supplying defaults for the options");

  json cfg = json::object();
  try {
    if (auto p = config_path(argc, argv)) cfg = read_json(*p);
    if (!cfg.is_object()) throw Error(ErrorKind::ParseError, "config file must hold a JSON object");
  } catch (const std::exception& e) {
    std::cerr << "critshape: " << e.what() << '\n';
    return kError;
  }

  DomainArg domain;
  std::string field = "1", g = "exp(u)", solution, perturb, csv, contours, scenario_id;
  double tol = kHp2Tol, h = 0.05, lambda = 1.0, hessian_tol = 1e-6;
  int steps = 20, levels = 12, interior = 200, boundary = 1024;
  std::vector<int> samples{2048, 1024};
  std::vector<double> eps{0.1, 0.05, 0.02, 0.01};
  bool refine = false;

  try {
    preset(cfg, "out", out);
    preset(cfg, "seed", seed);
    domain.preset_from(cfg, "domain");
    preset(cfg, "field", field);
    preset(cfg, "g", g);
    preset(cfg, "tol", tol);
    preset(cfg, "h", h);
    preset(cfg, "lambda", lambda);
    preset(cfg, "steps", steps);
    preset(cfg, "levels", levels);
    preset(cfg, "samples", samples);
    preset(cfg, "interior", interior);
    preset(cfg, "boundary", boundary);
    preset(cfg, "hessian_tol", hessian_tol);
    preset(cfg, "solution", solution);
    preset(cfg, "perturb", perturb);
    preset(cfg, "eps", eps);
    preset(cfg, "csv", csv);
    preset(cfg, "contours", contours);
    if (cfg.contains("base")) domain.preset_from(cfg, "base");
  } catch (const std::exception& e) {
    std::cerr << "critshape: " << e.what() << '\n';
    return kError;
  }

  auto* hyp = app.add_subcommand("check-hypotheses", "Check positivity, the log-Laplacian condition and the boundary margin");
  hyp->add_option("--domain", domain.path, "Domain JSON file (default: unit disk)");
  hyp->add_option("--field", field, "Forcing f(x, y)");
  hyp->add_option("--tol", tol, "Tolerance on the relative log-Laplacian defect");
  hyp->add_option("--samples", samples, "Interior,boundary sample counts")->delimiter(',');

  auto* map = app.add_subcommand("build-map", "Build the conformal map for f and report its identities");
  map->add_option("--domain", domain.path, "Domain JSON file (default: unit disk)");
  map->add_option("--field", field, "Forcing f(x, y) with log f harmonic");
  map->add_option("--interior", interior, "Interior samples for the modulus check");
  map->add_option("--boundary", boundary, "Boundary angles for curvature and injectivity");

  auto* solve = app.add_subcommand("solve", "Solve -lap u = f with zero boundary data");
  solve->add_option("--domain", domain.path, "Domain JSON file (default: unit disk)");
  solve->add_option("--field", field, "Forcing f(x, y)");
  solve->add_option("--h", h, "Target mesh size");
  solve->add_option("--contours", contours, "Write a contour CSV here");
  solve->add_option("--levels", levels, "Number of contour levels");

  auto* nonlin = app.add_subcommand("solve-nonlinear", "Solve -lap u = lambda g(u) by continuation");
  nonlin->add_option("--domain", domain.path, "Domain JSON file (default: unit disk)");
  nonlin->add_option("--g", g, "Nonlinearity g(u); x is accepted for u");
  nonlin->add_option("--lambda", lambda, "Parameter");
  nonlin->add_option("--steps", steps, "Continuation steps");
  nonlin->add_option("--h", h, "Target mesh size");
  nonlin->add_option("--contours", contours, "Write a contour CSV here");
  nonlin->add_option("--levels", levels, "Number of contour levels");

  auto* crit = app.add_subcommand("critical-points", "Find and classify critical points of a stored solution");
  crit->add_option("--solution", solution, "Solution JSON written by solve or solve-nonlinear");
  crit->add_option("--hessian-tol", hessian_tol, "Degeneracy tolerance |det H| <= tol |H|^2");

  auto* family = app.add_subcommand("track-family", "Follow the critical point along a family of perturbed domains");
  family->add_option("--base", domain.path, "Convex base domain JSON file (default: unit disk)");
  family->add_option("--perturb", perturb, "Perturbation profile JSON file (a0, a, b)");
  family->add_option("--eps", eps, "Amplitudes")->delimiter(',');
  family->add_option("--g", g, "Nonlinearity g(u)");
  family->add_option("--lambda", lambda, "Parameter");
  family->add_option("--steps", steps, "Continuation steps");
  family->add_option("--h", h, "Target mesh size");
  family->add_option("--csv", csv, "Trajectory CSV (default: next to --out)");

  auto* run = app.add_subcommand("run-scenario", "Run a named scenario");
  run->add_option("id", scenario_id, "Scenario id (or 'id' in the config)");
  auto* run_h = run->add_option("--h", h, "Mesh size");
  auto* run_refine = run->add_flag("--refine", refine, "Also solve at h / 2");
  auto* run_contours = run->add_option("--contours", contours, "Write a contour CSV of the first solution");

  auto* list = app.add_subcommand("list-scenarios", "List the scenario presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kError;
  }

  try {
    if (*hyp) {
      if (samples.size() != 2) throw Error(ErrorKind::InvalidArgument, "--samples needs two counts");
      const auto r = check_hypotheses(domain.get(), ScalarField(field), samples[0], samples[1], tol, seed);
      emit(r, out);
      return r.pass() ? kPass : kFail;
    }

    if (*map) {
      const StarDomain d = domain.get();
      const ScalarField f(field);
      const auto hr = check_hypotheses(d, f, 2048, boundary, tol, seed);
      const auto m = build_map(d, f, tol);
      double modulus = 0.0;
      for (const auto& z : halton_interior_points(d, interior, seed)) modulus = std::max(modulus, modulus_residual(m, z));
      json curv = json::array();
      double tangential = 0.0, gap = 0.0, min_curv = INFINITY;
      for (int k = 0; k < boundary; ++k) {
        const double t = 2 * std::numbers::pi * k / boundary;
        const auto ic = image_curvature(m, t);
        curv.push_back({{"theta", t}, {"curvature", ic.curvature}, {"curvature_alt", ic.curvature_alt}});
        tangential = std::max(tangential, tangential_identity_residual(m, t));
        gap = std::max(gap, std::abs(ic.curvature - ic.curvature_alt));
        min_curv = std::min(min_curv, ic.curvature);
      }
      const auto inj = check_injectivity(m, boundary);
      json poly = json::array();
      for (const auto& z : m.boundary_image()) poly.push_back({z.real(), z.imag()});
      const bool convex_ok = !hr.pass() || min_curv >= -1e-6;
      emit({{"hypotheses", hr},
            {"modulus_residual_max", modulus},
            {"tangential_residual_max", tangential},
            {"curvature_formula_gap_max", gap},
            {"min_image_curvature", min_curv},
            {"image_curvature", curv},
            {"injectivity", inj},
            {"boundary_image", poly},
            {"pass", inj.injective && convex_ok}},
           out);
      return inj.injective && convex_ok ? kPass : kFail;
    }

    if (*solve) {
      auto mesh = std::make_shared<const Mesh>(triangulate(domain.get(), h));
      const auto s = solve_poisson(mesh, ScalarField(field));
      emit(s, out);
      write_contours(s, contours, levels);
      return kPass;
    }

    if (*nonlin) {
      auto mesh = std::make_shared<const Mesh>(triangulate(domain.get(), h));
      const ScalarField gf(g);
      const auto s = solve_nonlinear(mesh, gf, lambda, steps);
      json j = s;
      json st = stability_eigenvalue(s, gf.derivative_field(0), lambda);
      st.erase("eigenfunction");
      j["stability"] = st;
      emit(j, out);
      write_contours(s, contours, levels);
      return kPass;
    }

    if (*crit) {
      if (solution.empty()) throw Error(ErrorKind::InvalidArgument, "--solution is required");
      const auto s = solution_from_json(read_json(solution));
      MorseConfig mc;
      mc.hessian_tol = hessian_tol;
      emit(find_critical_points(s, mc), out);
      return kPass;
    }

    if (*family) {
      ScenarioConfig sc = default_config("perturbed-family");
      sc.domain = domain.get();
      if (!perturb.empty()) sc.profile = read_json(perturb).get<ChiProfile>();
      sc.epsilons = eps;
      sc.g = g;
      sc.lambda = lambda;
      sc.steps = steps;
      sc.h = h;
      sc.seed = seed;
      const auto r = run_scenario(sc);
      emit(r.report, out);
      if (csv.empty() && !out.empty()) csv = csv_path_for(out);
      if (!csv.empty() && r.report.contains("family")) write_family_csv(r.report["family"], csv);
      if (r.verdict == "error") {
        std::cerr << "critshape: " << r.report["error"].get<std::string>() << '\n';
        return kError;
      }
      return r.pass ? kPass : kFail;
    }

    if (*run) {
      ScenarioConfig sc = config_from_json(cfg, scenario_id);
      if (run_h->count()) sc.h = h;
      if (run_refine->count()) sc.refine = refine;
      if (run_contours->count()) sc.contours = contours;
      if (app.get_option("--seed")->count()) sc.seed = seed;
      sc.out.clear();  // written below together with the timings
      const auto r = run_scenario(sc);
      emit(full_report(r), out);
      if (!out.empty()) std::cerr << r.id << ": " << r.verdict << '\n';
      if (r.verdict == "error") return kError;
      return r.pass ? kPass : kFail;
    }

    if (*list) {
      for (const auto& s : scenario_catalog()) std::cout << s.id << "  " << s.summary << '\n';
      return kPass;
    }
  } catch (const ContinuationError& e) {
    std::cerr << "critshape: " << e.what() << " (reached lambda = " << e.lambda_reached() << ")\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "critshape: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
