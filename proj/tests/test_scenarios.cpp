#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "critshape/contour.hpp"
#include "critshape/error.hpp"
#include "critshape/scenarios.hpp"
#include "critshape/solver.hpp"

using namespace critshape;
using nlohmann::json;

namespace {

double signed_area(const std::vector<Point>& pts) {
  double a = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto& q = pts[(i + 1) % pts.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return a / 2;
}

const json* find_check(const json& report, const std::string& name) {
  for (const auto& c : report["checks"])
    if (c["name"] == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("straight level line on a square") {
  const Mesh m = structured_square_mesh(1.0, 8);
  std::vector<double> u(m.num_vertices());
  for (int i = 0; i < m.num_vertices(); ++i) u[i] = m.vertices[i].x();
  const auto lines = contour_lines(m, u, 0.53);
  REQUIRE(lines.size() == 1);
  CHECK_FALSE(lines[0].closed);
  for (const auto& p : lines[0].points) CHECK(p.x() == doctest::Approx(0.53));
  CHECK(std::abs(lines[0].points.front().y() - lines[0].points.back().y()) == doctest::Approx(1.0));
  CHECK(contour_lines(m, u, 2.0).empty());
}

TEST_CASE("torsion level sets are circles") {
  const auto m = std::make_shared<const Mesh>(triangulate(StarDomain{}, 0.05));
  const auto s = solve_poisson(m, ScalarField("1"));
  for (double level : {0.05, 0.1, 0.2}) {
    const auto lines = contour_lines(*m, s.values, level);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].closed);
    const double r = std::sqrt(1 - 4 * level);
    for (const auto& p : lines[0].points) CHECK(std::abs(p.norm() - r) < 5e-3);
  }
}

TEST_CASE("mesh boundary is one counterclockwise loop") {
  const Mesh m = triangulate(StarDomain(0.0, {0.0, 0.45}, {}), 0.1);
  const auto loops = mesh_boundary(m);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].closed);
  int nb = 0;
  for (char b : m.boundary) nb += b;
  CHECK(static_cast<int>(loops[0].points.size()) == nb);
  CHECK(signed_area(loops[0].points) > 0);
}

TEST_CASE("contour csv layout") {
  const auto m = std::make_shared<const Mesh>(triangulate(StarDomain{}, 0.1));
  const auto s = solve_poisson(m, ScalarField("1"));
  const auto levels = default_levels(s.values, 3);
  REQUIRE(levels.size() == 3);
  CHECK(levels[0] == doctest::Approx(s.max_value() / 4));
  std::ostringstream out;
  write_contour_csv(out, *m, s.values, levels);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "kind,level,polyline,x,y");
  int boundary = 0, contour = 0;
  std::set<int> ids;
  while (std::getline(in, line)) {
    if (line.rfind("boundary,", 0) == 0) ++boundary;
    if (line.rfind("contour,", 0) == 0) ++contour;
    std::istringstream row(line);
    std::string kind, level, id;
    std::getline(row, kind, ',');
    std::getline(row, level, ',');
    std::getline(row, id, ',');
    ids.insert(std::stoi(id));
  }
  CHECK(boundary > 0);
  CHECK(contour > 0);
  CHECK(ids.size() == 4);  // boundary plus one loop per level
}

TEST_CASE("catalog and presets") {
  const auto cat = scenario_catalog();
  CHECK(cat.size() == 7);
  for (const auto& s : cat) {
    CHECK(is_scenario(s.id));
    CHECK(default_config(s.id).id == s.id);
  }
  CHECK_FALSE(is_scenario("nope"));
  CHECK_THROWS_AS(default_config("nope"), Error);
  CHECK(default_config("perturbed-family").epsilons.size() == 4);
  CHECK(default_config("exp-nonconvex").refine);
}

TEST_CASE("config json overrides the preset and round trips") {
  const auto c = config_from_json(json{{"id", "torsion-convex"}, {"h", 0.1}, {"henon", {{"p", 5.0}}}});
  CHECK(c.h == 0.1);
  CHECK(c.henon.p == 5.0);
  CHECK(c.henon.alpha == 1.0);
  CHECK(c.field == "1");
  const json j = c;
  const auto back = config_from_json(j);
  CHECK(json(back) == j);
  CHECK(config_from_json(json::object(), "lambda-star").id == "lambda-star");
  CHECK_THROWS_AS(config_from_json(json{{"id", "torsion-convex"}, {"hh", 1}}), Error);
  CHECK_THROWS_AS(config_from_json(json{{"h", 0.1}}), Error);
  CHECK_THROWS_AS(config_from_json(json{{"id", "torsion-convex"}, {"h", -1.0}}), Error);
  CHECK_THROWS_AS(config_from_json(json{{"id", "torsion-convex"}, {"h", "small"}}), Error);
}

TEST_CASE("every preset reaches its expected verdict") {
  const std::map<std::string, std::string> expected{
      {"torsion-convex", "pass"},    {"exp-nonconvex", "pass"},       {"dumbbell-hp3-fails", "pass-as-counterexample"},
      {"henon-defect", "pass"},      {"conformal-roundtrip", "pass"}, {"perturbed-family", "pass"},
      {"lambda-star", "pass"}};
  for (const auto& [id, verdict] : expected) {
    CAPTURE(id);
    const auto r = run_scenario(default_config(id));
    CHECK(r.verdict == verdict);
    CHECK(r.pass);
    CHECK(r.report["version"] == kVersion);
    CHECK(r.report["config"]["id"] == id);
    // margins are embedded so the verdict can be audited from the file
    CHECK((r.report.contains("hypotheses") || r.report.contains("convexity")));
    for (const auto& c : r.report["checks"]) CHECK(c["pass"].get<bool>());
  }
}

TEST_CASE("reports are reproducible") {
  for (const char* id : {"dumbbell-hp3-fails", "perturbed-family", "henon-defect"}) {
    const auto a = run_scenario(default_config(id));
    const auto b = run_scenario(default_config(id));
    CHECK(a.report.dump() == b.report.dump());
    CHECK(full_report(a).contains("timings"));
  }
}

TEST_CASE("stage errors become an error verdict") {
  auto c = default_config("torsion-convex");
  c.field = "log(x - 5)";
  const auto r = run_scenario(c);
  CHECK(r.verdict == "error");
  CHECK_FALSE(r.pass);
  CHECK(r.report["error"].get<std::string>().size() > 0);
}

TEST_CASE("a failed expectation is a fail verdict") {
  // f = 1 on the dumbbell does not satisfy the torsion preset's checks
  auto c = default_config("torsion-convex");
  c.domain = StarDomain(0.0, {0.0, 0.45}, {});
  c.h = 0.1;
  const auto r = run_scenario(c);
  CHECK(r.verdict == "fail");
  const json* hyp = find_check(r.report, "hypotheses_hold");
  REQUIRE(hyp);
  CHECK_FALSE((*hyp)["pass"].get<bool>());
}

TEST_CASE("henon defect at the profile's critical point") {
  const auto r = run_scenario(default_config("henon-defect")).report;
  const auto& q = r["critical_point_of_profile"];
  CHECK(std::abs(q["location"][0].get<double>()) == doctest::Approx(1 / std::sqrt(3.0)));
  CHECK(q["defect"].get<double>() < 0);
  // by hand at Q = (1/sqrt 3, 0): h = 4/3, lap h = -12, alpha = 1, p = 3, eps = 0.01
  CHECK(q["defect"].get<double>() == doctest::Approx((64.0 / 81 + 0.01) * (-320.0 / 27) - 16384.0 / 2187));
  CHECK(q["defect"].get<double>() == doctest::Approx(q["defect_reduced_formula"].get<double>()));
  CHECK(r["hypotheses"]["hp3"]["min_margin"].get<double>() == doctest::Approx(0.01));
}

TEST_CASE("scenario writes report and contours") {
  auto c = default_config("torsion-convex");
  c.h = 0.1;
  c.out = "scenario_report_test.json";
  c.contours = "scenario_contours_test.csv";
  c.contour_levels = 4;
  const auto r = run_scenario(c);
  std::ifstream rep(c.out), csv(c.contours);
  REQUIRE(rep);
  REQUIRE(csv);
  const json j = json::parse(rep);
  CHECK(j["verdict"] == "pass");
  CHECK(j.contains("timings"));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "kind,level,polyline,x,y");
}
