#include "critshape/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>

#include <Eigen/LU>

#include "critshape/conformal.hpp"
#include "critshape/contour.hpp"
#include "critshape/error.hpp"
#include "critshape/hypotheses.hpp"
#include "critshape/morse.hpp"

namespace critshape {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

StarDomain dumbbell_domain() { return StarDomain(0.0, {0.0, 0.45}, {}); }

// r = 0.8 (1 - 0.4 ((1 + cos t) / 2)^4): flattened, and slightly dented, on
// the right where e^{2x} is largest.
StarDomain exp_nonconvex_domain() { return StarDomain(-0.2875, {-0.14, -0.07, -0.02, -0.0025}, {}); }

const std::vector<ScenarioInfo>& catalog() {
  static const std::vector<ScenarioInfo> c{
      {"torsion-convex", "unit disk, f = 1: hypotheses hold and there is one critical point"},
      {"exp-nonconvex", "nonconvex domain, f = exp(2x): hypotheses hold, one critical point under refinement"},
      {"dumbbell-hp3-fails", "two-lobe domain, f = 1: boundary margin negative and two maxima plus a saddle"},
      {"henon-defect", "f = |z|^(2a) h^p + eps on the disk: log-Laplacian defect negative, boundary margin positive"},
      {"conformal-roundtrip", "unit disk, f = exp(2x): map identities, image curvature and inverse round trip"},
      {"perturbed-family", "disk + eps cos 3t, -lap u = e^u: critical point and solution converge as eps -> 0"},
      {"lambda-star", "unit disk, -lap u = lambda e^u: u(0) against the radial solution, stability and lambda*"},
  };
  return c;
}

class Clock {
 public:
  explicit Clock(json& sink) : sink_(sink) {}
  template <class F>
  auto time(const std::string& stage, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Record {
      json& sink;
      std::string stage;
      std::chrono::steady_clock::time_point t0;
      ~Record() { sink[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
    } record{sink_, stage, t0};
    return fn();
  }

 private:
  json& sink_;
};

// Named boolean checks with the numbers they were decided on.
class Checks {
 public:
  bool add(const std::string& name, bool ok, json detail = json::object()) {
    detail["name"] = name;
    detail["pass"] = ok;
    list_.push_back(std::move(detail));
    all_ = all_ && ok;
    return ok;
  }
  bool all() const { return all_; }
  const json& list() const { return list_; }

 private:
  json list_ = json::array();
  bool all_ = true;
};

json point_json(const Point& p) { return json::array({p.x(), p.y()}); }

json summary(const SolutionField& s) {
  return {{"h", s.mesh->h},
          {"vertices", s.mesh->num_vertices()},
          {"triangles", s.mesh->num_triangles()},
          {"max_value", s.max_value()},
          {"argmax", point_json(s.mesh->vertices[s.argmax()])},
          {"residual", s.residual},
          {"iterations", s.iterations}};
}

json morse_json(const std::vector<CriticalPoint>& cps) {
  const auto c = count_types(cps);
  return {{"points", cps},
          {"count", cps.size()},
          {"maxima", c.maxima},
          {"minima", c.minima},
          {"saddles", c.saddles},
          {"degenerate", c.degenerate},
          {"max_minus_saddles", c.maxima - c.saddles}};
}

bool single_nondegenerate_max(const std::vector<CriticalPoint>& cps) {
  return cps.size() == 1 && cps[0].type == MorseType::Max && cps[0].nondegenerate;
}

// Largest distance from a point of `a` to its match in `b`, assuming both are
// sorted by location and have the same size.
double max_shift(const std::vector<CriticalPoint>& a, const std::vector<CriticalPoint>& b) {
  double d = 0.0;
  for (const auto& p : a) {
    double best = INFINITY;
    for (const auto& q : b) best = std::min(best, (p.location - q.location).norm());
    d = std::max(d, best);
  }
  return d;
}

struct Level {
  SolutionField sol;
  std::vector<CriticalPoint> cps;
};

struct Context {
  const ScenarioConfig& cfg;
  StarDomain domain;
  MorseConfig morse;
  json report;
  Checks checks;
  Clock clock;
  std::string verdict_on_pass = "pass";
  std::optional<SolutionField> plotted;

  Context(const ScenarioConfig& c, json& timings) : cfg(c), domain(c.domain.value_or(StarDomain{})), clock(timings) {
    morse.hessian_tol = c.hessian_tol;
  }

  std::shared_ptr<const Mesh> mesh(double h, const std::string& stage) {
    return clock.time(stage, [&] { return std::make_shared<const Mesh>(triangulate(domain, h)); });
  }

  HypothesisReport hypotheses(const ScalarField& f) {
    auto r = clock.time("hypotheses", [&] {
      return check_hypotheses(domain, f, cfg.n_interior, cfg.n_boundary, cfg.hp2_tol, cfg.seed);
    });
    report["hypotheses"] = r;
    return r;
  }

  void convexity() {
    const auto c = is_convex(domain);
    report["convexity"] = {{"convex", c.convex}, {"min_curvature", c.min_curvature}, {"argmin_theta", c.argmin_theta}};
  }

  // Poisson solves at h and, if refining, h / 2.
  std::vector<Level> poisson_levels(const ScalarField& f) {
    std::vector<Level> levels;
    std::vector<double> hs{cfg.h};
    if (cfg.refine) hs.push_back(cfg.h / 2);
    json out = json::array();
    for (std::size_t k = 0; k < hs.size(); ++k) {
      const std::string tag = "h" + std::to_string(k);
      auto m = mesh(hs[k], "mesh_" + tag);
      auto sol = clock.time("solve_" + tag, [&] { return solve_poisson(m, f); });
      auto cps = clock.time("critical_points_" + tag, [&] { return find_critical_points(sol, morse); });
      out.push_back({{"solution", summary(sol)}, {"critical_points", morse_json(cps)}});
      levels.push_back({std::move(sol), std::move(cps)});
    }
    report["levels"] = out;
    plotted = levels.front().sol;
    return levels;
  }

  void morse_relation(const std::vector<Level>& levels) {
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const auto c = count_types(levels[k].cps);
      checks.add("morse_relation_h" + std::to_string(k), c.maxima - c.saddles == 1,
                 {{"maxima", c.maxima}, {"saddles", c.saddles}});
    }
  }

  void refinement_stability(const std::vector<Level>& levels) {
    if (levels.size() < 2) return;
    const bool same = levels[0].cps.size() == levels[1].cps.size();
    const double shift = same ? max_shift(levels[0].cps, levels[1].cps) : INFINITY;
    checks.add("count_stable_under_refinement", same,
               {{"counts", {levels[0].cps.size(), levels[1].cps.size()}}});
    checks.add("location_shift_within_3h", same && shift <= 3 * cfg.h,
               {{"shift", same ? json(shift) : json(nullptr)}, {"bound", 3 * cfg.h}});
  }
};

void torsion_convex(Context& c) {
  const ScalarField f(c.cfg.field);
  c.convexity();
  const auto hyp = c.hypotheses(f);
  c.checks.add("hypotheses_hold", hyp.pass(), {{"hp3_min_margin", hyp.hp3.min_margin}});
  const auto levels = c.poisson_levels(f);
  for (std::size_t k = 0; k < levels.size(); ++k)
    c.checks.add("single_nondegenerate_max_h" + std::to_string(k), single_nondegenerate_max(levels[k].cps),
                 {{"count", levels[k].cps.size()}});
  c.morse_relation(levels);
  c.refinement_stability(levels);
}

void exp_nonconvex(Context& c) {
  const ScalarField f(c.cfg.field);
  c.convexity();
  c.checks.add("domain_nonconvex", c.report["convexity"]["min_curvature"].get<double>() < 0,
               {{"min_curvature", c.report["convexity"]["min_curvature"]}});
  const auto hyp = c.hypotheses(f);
  c.checks.add("hypotheses_hold", hyp.pass(),
               {{"hp2_max_defect", hyp.hp2.max_defect}, {"hp3_min_margin", hyp.hp3.min_margin}});

  const auto map = c.clock.time("map", [&] { return build_map(c.domain, f, c.cfg.hp2_tol); });
  const auto inj = c.clock.time("injectivity", [&] { return check_injectivity(map, c.cfg.n_boundary); });
  double min_image_curvature = INFINITY;
  for (int k = 0; k < c.cfg.n_boundary; ++k)
    min_image_curvature = std::min(min_image_curvature, image_curvature(map, 2 * kPi * k / c.cfg.n_boundary).curvature);
  c.report["map"] = {{"injectivity", inj}, {"min_image_curvature", min_image_curvature}};
  c.checks.add("map_injective", inj.injective);
  c.checks.add("image_convex", min_image_curvature >= -1e-6, {{"min_image_curvature", min_image_curvature}});

  const auto levels = c.poisson_levels(f);
  for (std::size_t k = 0; k < levels.size(); ++k)
    c.checks.add("single_nondegenerate_max_h" + std::to_string(k), single_nondegenerate_max(levels[k].cps),
                 {{"count", levels[k].cps.size()}});
  c.morse_relation(levels);
  c.refinement_stability(levels);
}

void dumbbell(Context& c) {
  const ScalarField f(c.cfg.field);
  c.verdict_on_pass = "pass-as-counterexample";
  c.convexity();
  const auto hyp = c.hypotheses(f);
  c.checks.add("hp3_fails", hyp.hp3.min_margin < 0,
               {{"hp3_min_margin", hyp.hp3.min_margin}, {"argmin_theta", hyp.hp3.argmin_theta}});
  c.checks.add("hp2_holds", hyp.hp2.pass, {{"hp2_max_defect", hyp.hp2.max_defect}});
  const auto levels = c.poisson_levels(f);
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const auto n = count_types(levels[k].cps);
    c.checks.add("two_maxima_and_a_saddle_h" + std::to_string(k), n.maxima >= 2 && n.saddles >= 1,
                 {{"maxima", n.maxima}, {"saddles", n.saddles}, {"count", levels[k].cps.size()}});
  }
  c.morse_relation(levels);
  c.refinement_stability(levels);
}

void henon_defect(Context& c) {
  const auto& hp = c.cfg.henon;
  const Expr profile = parse_expression(hp.profile);
  const Expr r2 = Expr::x() * Expr::x() + Expr::y() * Expr::y();
  const ScalarField f(pow(r2, Expr::constant(hp.alpha)) * pow(profile, Expr::constant(hp.p)) + Expr::constant(hp.epsilon));
  const ScalarField H(profile);
  c.report["field"] = f.str();

  // check_hypotheses records the hp2 failure but would stop at the maximum;
  // the sign pattern needs every sample.
  const auto hyp = c.hypotheses(f);
  const auto pts = halton_interior_points(c.domain, c.cfg.n_interior, c.cfg.seed);
  int negative = 0, positive = 0;
  double min_defect = INFINITY;
  Point argmin = Point::Zero();
  for (const auto& z : pts) {
    const double d = log_laplacian_defect(f, z);
    if (d < 0) ++negative;
    if (d > 0) ++positive;
    if (d < min_defect) min_defect = d, argmin = z;
  }
  c.report["defect"] = {{"samples", pts.size()},
                        {"negative", negative},
                        {"positive", positive},
                        {"min", min_defect},
                        {"argmin", point_json(argmin)}};
  c.checks.add("positive_field", hyp.positivity.pass, {{"min_value", hyp.positivity.min_value}});
  c.checks.add("hp2_fails", !hyp.hp2.pass && negative > 0, {{"negative_samples", negative}});
  c.checks.add("boundary_margin_positive", hyp.hp3.min_margin > 0, {{"hp3_min_margin", hyp.hp3.min_margin}});

  // Q: critical point of the profile away from the origin, from the best
  // sample by Newton on its gradient.
  Point q = Point::Zero();
  double best = -INFINITY;
  for (const auto& z : pts)
    if (z.norm() > 0.1 && H(z) > best) best = H(z), q = z;
  for (int it = 0; it < 50; ++it) {
    const Jet j = H.eval_jet(q);
    const Eigen::Vector2d step = j.hessian.fullPivLu().solve(j.gradient);
    q -= step;
    if (step.norm() < 1e-14) break;
  }
  const Jet hq = H.eval_jet(q);
  const double direct = log_laplacian_defect(f, q);
  // With grad H(Q) = 0 and g = |z|^(2a): grad f = H^p grad g and
  // lap f = H^p lap g + g p H^(p-1) lap H.
  const double rq2 = q.squaredNorm(), a = hp.alpha, p = hp.p;
  const double g = std::pow(rq2, a), Hp = std::pow(hq.value, p);
  const double lap_g = 4 * a * a * std::pow(rq2, a - 1), grad_g2 = 4 * a * a * std::pow(rq2, 2 * a - 1);
  const double lap_H = hq.hessian.trace();
  const double reduced = (g * Hp + hp.epsilon) * (Hp * lap_g + g * p * std::pow(hq.value, p - 1) * lap_H) - Hp * Hp * grad_g2;
  c.report["critical_point_of_profile"] = {{"location", point_json(q)},
                                           {"gradient_norm", hq.gradient.norm()},
                                           {"defect", direct},
                                           {"defect_reduced_formula", reduced}};
  c.checks.add("profile_critical_point_found", hq.gradient.norm() < 1e-10 && q.norm() > 1e-6 && contains(c.domain, q),
               {{"location", point_json(q)}});
  c.checks.add("defect_negative_at_critical_point", direct < 0, {{"defect", direct}});
  c.checks.add("reduced_formula_agrees", std::abs(direct - reduced) <= 1e-8 * std::max(1.0, std::abs(direct)),
               {{"difference", std::abs(direct - reduced)}});
}

void conformal_roundtrip(Context& c) {
  const ScalarField f(c.cfg.field);
  const auto hyp = c.hypotheses(f);
  c.checks.add("hypotheses_hold", hyp.pass(), {{"hp3_min_margin", hyp.hp3.min_margin}});
  const auto map = c.clock.time("map", [&] { return build_map(c.domain, f, c.cfg.hp2_tol); });

  const auto pts = halton_interior_points(c.domain, 200, c.cfg.seed);
  double modulus = 0.0, roundtrip = 0.0;
  c.clock.time("interior", [&] {
    for (const auto& z : pts) {
      modulus = std::max(modulus, modulus_residual(map, z));
      roundtrip = std::max(roundtrip, (inverse(map, map(z)) - z).norm());
    }
    return 0;
  });
  const int n = 256;
  double tangential = 0.0, formulas = 0.0, min_curv = INFINITY;
  json curvature = json::array();
  c.clock.time("boundary", [&] {
    for (int k = 0; k < n; ++k) {
      const double t = 2 * kPi * k / n;
      tangential = std::max(tangential, tangential_identity_residual(map, t));
      const auto ic = image_curvature(map, t);
      formulas = std::max(formulas, std::abs(ic.curvature - ic.curvature_alt));
      min_curv = std::min(min_curv, ic.curvature);
      curvature.push_back({t, ic.curvature});
    }
    return 0;
  });
  const auto inj = check_injectivity(map, c.cfg.n_boundary);
  const double k0 = image_curvature(map, 0.0).curvature;
  c.report["map"] = {{"modulus_residual_max", modulus},
                     {"roundtrip_max", roundtrip},
                     {"tangential_residual_max", tangential},
                     {"curvature_formula_gap_max", formulas},
                     {"image_curvature_at_0", k0},
                     {"min_image_curvature", min_curv},
                     {"image_curvature", curvature},
                     {"injectivity", inj}};
  c.checks.add("modulus_identity", modulus < 1e-8, {{"max", modulus}});
  c.checks.add("tangential_identity", tangential < 1e-8, {{"max", tangential}});
  c.checks.add("curvature_formulas_agree", formulas < 1e-8, {{"max", formulas}});
  c.checks.add("inverse_roundtrip", roundtrip < 1e-9, {{"max", roundtrip}});
  c.checks.add("map_injective", inj.injective);
  if (hyp.pass()) c.checks.add("image_convex", min_curv >= -1e-6, {{"min", min_curv}});
  // T = e^z - 1 maps the unit circle to a curve of curvature 2/e at z = 1
  if (c.domain == StarDomain{} && f.str() == ScalarField("exp(2*x)").str())
    c.checks.add("curvature_at_0_closed_form", std::abs(k0 - 2 / std::numbers::e) < 1e-6,
                 {{"value", k0}, {"expected", 2 / std::numbers::e}});
}

void perturbed_family(Context& c) {
  c.convexity();
  c.checks.add("base_convex", c.report["convexity"]["convex"].get<bool>());
  const auto rep = c.clock.time("family", [&] {
    return track_family(c.domain, c.cfg.profile, c.cfg.epsilons, NonlinearSpec{c.cfg.g, c.cfg.lambda, c.cfg.steps},
                        c.cfg.h, SolverConfig{}, c.morse);
  });
  c.report["family"] = rep;
  c.report["profile"] = c.cfg.profile;
  c.checks.add("limit_single_nondegenerate_max", single_nondegenerate_max(rep.limit_points),
               {{"count", rep.limit_points.size()}, {"mu1", rep.limit_mu1}});
  bool each = true, stable = true, relation = true;
  for (const auto& e : rep.entries) {
    each = each && e.ok && single_nondegenerate_max(e.points);
    stable = stable && e.ok && e.mu1 > 0;
    if (e.ok) {
      const auto n = count_types(e.points);
      relation = relation && n.maxima - n.saddles == 1;
    }
  }
  c.checks.add("single_nondegenerate_max_each_member", each);
  c.checks.add("members_stable", stable);
  c.checks.add("morse_relation", relation);

  bool distance = each, norms = each;
  json dist = json::array(), sups = json::array(), locs = json::array();
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    const auto& e = rep.entries[i];
    dist.push_back(e.distance_to_limit);
    locs.push_back(e.norm_of_location);
    sups.push_back({e.difference.sup[0], e.difference.sup[1], e.difference.sup[2]});
    if (i == 0 || !each) continue;
    const auto& prev = rep.entries[i - 1];
    distance = distance && e.distance_to_limit < prev.distance_to_limit;
    for (int k = 0; k < 3; ++k) norms = norms && e.difference.sup[k] < prev.difference.sup[k];
  }
  // with a symmetric base and profile the limit point sits at the origin, so
  // the distance to it is the norm of the location up to mesh noise
  c.checks.add("distance_to_limit_decreasing", distance, {{"values", dist}, {"norm_of_location", locs}});
  c.checks.add("sup_norms_decreasing", norms, {{"values", sups}});
}

// Minimal radial solution of -lap u = lambda e^u on the unit disk:
// u = log(8 mu / (lambda (1 + mu r^2)^2)) with 8 mu = lambda (1 + mu)^2.
double gelfand_center(double lambda) {
  const double b = 8 - 2 * lambda;
  const double mu = (b - std::sqrt(b * b - 4 * lambda * lambda)) / (2 * lambda);
  return std::log(8 * mu / lambda);
}

void lambda_star(Context& c) {
  const ScalarField g(c.cfg.g);
  c.convexity();
  auto m = c.mesh(c.cfg.h, "mesh_h0");
  const auto sol = c.clock.time("solve_h0", [&] { return solve_nonlinear(m, g, c.cfg.lambda, c.cfg.steps); });
  c.plotted = sol;
  const auto cps = c.clock.time("critical_points_h0", [&] { return find_critical_points(sol, c.morse); });
  const auto stab = c.clock.time("stability", [&] { return stability_eigenvalue(sol, g.derivative_field(0), c.cfg.lambda); });
  const auto star = c.clock.time("lambda_star", [&] { return lambda_star_estimate(m, g); });

  const MeshLocator locator(*m);
  const auto center = sample_solution(sol, locator, Point::Zero());
  const double u0 = center ? center->value : NAN;

  json st = stab;
  st.erase("eigenfunction");
  c.report["levels"] = json::array({{{"solution", summary(sol)}, {"critical_points", morse_json(cps)}}});
  c.report["u_at_origin"] = u0;
  c.report["stability"] = st;
  c.report["lambda_star"] = star;

  c.checks.add("single_nondegenerate_max", single_nondegenerate_max(cps), {{"count", cps.size()}});
  const auto n = count_types(cps);
  c.checks.add("morse_relation_h0", n.maxima - n.saddles == 1, {{"maxima", n.maxima}, {"saddles", n.saddles}});
  c.checks.add("stable", stab.mu1 > 0, {{"mu1", stab.mu1}});
  c.checks.add("lambda_star_bracketed", !star.budget_exhausted, {{"lower", star.lower}, {"upper", star.upper}});
  const bool gelfand_disk = c.domain == StarDomain{} && g.str() == ScalarField("exp(u)").str();
  if (gelfand_disk && c.cfg.lambda > 0 && c.cfg.lambda <= 2) {
    const double oracle = gelfand_center(c.cfg.lambda);
    c.report["u_at_origin_closed_form"] = oracle;
    c.checks.add("u_at_origin_matches_radial_solution", std::abs(u0 - oracle) < 5e-3, {{"value", u0}, {"expected", oracle}});
    c.checks.add("lambda_star_is_2", std::abs(star.lambda_star - 2) < 1e-2, {{"value", star.lambda_star}});
  }
}

using Pipeline = std::function<void(Context&)>;

Pipeline pipeline(const std::string& id) {
  if (id == "torsion-convex") return torsion_convex;
  if (id == "exp-nonconvex") return exp_nonconvex;
  if (id == "dumbbell-hp3-fails") return dumbbell;
  if (id == "henon-defect") return henon_defect;
  if (id == "conformal-roundtrip") return conformal_roundtrip;
  if (id == "perturbed-family") return perturbed_family;
  if (id == "lambda-star") return lambda_star;
  throw Error(ErrorKind::InvalidArgument, "unknown scenario '" + id + "'");
}

}  // namespace

std::vector<ScenarioInfo> scenario_catalog() { return catalog(); }

bool is_scenario(const std::string& id) {
  for (const auto& s : catalog())
    if (s.id == id) return true;
  return false;
}

ScenarioConfig default_config(const std::string& id) {
  if (!is_scenario(id)) throw Error(ErrorKind::InvalidArgument, "unknown scenario '" + id + "'");
  ScenarioConfig c;
  c.id = id;
  c.domain = StarDomain{};
  if (id == "exp-nonconvex") {
    c.domain = exp_nonconvex_domain();
    c.field = "exp(2*x)";
    c.refine = true;
  } else if (id == "dumbbell-hp3-fails") {
    c.domain = dumbbell_domain();
    c.refine = true;
  } else if (id == "conformal-roundtrip") {
    c.field = "exp(2*x)";
  } else if (id == "perturbed-family") {
    c.epsilons = {0.1, 0.05, 0.02, 0.01};
    c.profile = ChiProfile{0.0, {0.0, 0.0, 1.0}, {}};
  }
  return c;
}

void to_json(json& j, const ScenarioConfig& c) {
  j = {{"id", c.id},
       {"domain", c.domain ? json(*c.domain) : json(nullptr)},
       {"field", c.field},
       {"g", c.g},
       {"lambda", c.lambda},
       {"steps", c.steps},
       {"h", c.h},
       {"refine", c.refine},
       {"epsilons", c.epsilons},
       {"profile", c.profile},
       {"henon", {{"alpha", c.henon.alpha}, {"p", c.henon.p}, {"epsilon", c.henon.epsilon}, {"profile", c.henon.profile}}},
       {"seed", c.seed},
       {"n_interior", c.n_interior},
       {"n_boundary", c.n_boundary},
       {"hp2_tol", c.hp2_tol},
       {"hessian_tol", c.hessian_tol},
       {"contour_levels", c.contour_levels},
       {"out", c.out},
       {"contours", c.contours}};
}

ScenarioConfig config_from_json(const json& j, const std::string& id) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "scenario config must be a JSON object");
  const std::string name = !id.empty() ? id : j.value("id", std::string{});
  if (name.empty()) throw Error(ErrorKind::InvalidArgument, "scenario config has no id");
  ScenarioConfig c = default_config(name);
  static const std::set<std::string> known{"id",      "domain",     "field",      "g",        "lambda",
                                           "steps",   "h",          "refine",     "epsilons", "profile",
                                           "henon",   "seed",       "n_interior", "n_boundary", "hp2_tol",
                                           "hessian_tol", "contour_levels", "out", "contours"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw Error(ErrorKind::InvalidArgument, "unknown scenario config key '" + key + "'");
  try {
    if (j.contains("domain") && !j["domain"].is_null()) c.domain = j["domain"].get<StarDomain>();
    c.field = j.value("field", c.field);
    c.g = j.value("g", c.g);
    c.lambda = j.value("lambda", c.lambda);
    c.steps = j.value("steps", c.steps);
    c.h = j.value("h", c.h);
    c.refine = j.value("refine", c.refine);
    c.epsilons = j.value("epsilons", c.epsilons);
    if (j.contains("profile")) c.profile = j["profile"].get<ChiProfile>();
    if (j.contains("henon")) {
      const auto& hj = j["henon"];
      c.henon.alpha = hj.value("alpha", c.henon.alpha);
      c.henon.p = hj.value("p", c.henon.p);
      c.henon.epsilon = hj.value("epsilon", c.henon.epsilon);
      c.henon.profile = hj.value("profile", c.henon.profile);
    }
    c.seed = j.value("seed", c.seed);
    c.n_interior = j.value("n_interior", c.n_interior);
    c.n_boundary = j.value("n_boundary", c.n_boundary);
    c.hp2_tol = j.value("hp2_tol", c.hp2_tol);
    c.hessian_tol = j.value("hessian_tol", c.hessian_tol);
    c.contour_levels = j.value("contour_levels", c.contour_levels);
    c.out = j.value("out", c.out);
    c.contours = j.value("contours", c.contours);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("scenario config: ") + e.what());
  }
  if (!(c.h > 0) || c.steps < 1 || c.n_interior < 1 || c.n_boundary < 8 || c.contour_levels < 0)
    throw Error(ErrorKind::InvalidArgument, "scenario config parameter out of range");
  return c;
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
  ScenarioReport out;
  out.id = config.id;
  out.timings = json::object();
  const auto run = pipeline(config.id);

  Context c(config, out.timings);
  c.report["id"] = config.id;
  c.report["version"] = kVersion;
  c.report["config"] = config;
  c.report["domain"] = c.domain;
  std::string failure;
  try {
    run(c);
  } catch (const std::exception& e) {
    failure = e.what();
  }
  c.report["checks"] = c.checks.list();
  if (!failure.empty()) {
    out.verdict = "error";
    c.report["error"] = failure;
  } else {
    out.verdict = c.checks.all() ? c.verdict_on_pass : "fail";
  }
  out.pass = failure.empty() && c.checks.all();
  c.report["verdict"] = out.verdict;
  c.report["pass"] = out.pass;

  if (!config.contours.empty() && c.plotted) {
    std::ofstream csv(config.contours);
    if (!csv) throw Error(ErrorKind::InvalidArgument, "cannot write " + config.contours);
    write_contour_csv(csv, *c.plotted->mesh, c.plotted->values, default_levels(c.plotted->values, config.contour_levels));
  }
  out.report = std::move(c.report);
  if (!config.out.empty()) {
    std::ofstream f(config.out);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + config.out);
    f << full_report(out).dump(2) << '\n';
  }
  return out;
}

json full_report(const ScenarioReport& r) {
  json j = r.report;
  j["timings"] = r.timings;
  return j;
}

}  // namespace critshape
