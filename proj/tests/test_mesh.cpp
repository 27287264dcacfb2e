#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <map>

#include "critshape/error.hpp"
#include "critshape/mesh.hpp"

using namespace critshape;
using std::numbers::pi;

namespace {

StarDomain dumbbell() { return StarDomain(0.0, {0.0, 0.45}, {}); }
StarDomain nonconvex() { return StarDomain(-0.2875, {-0.14, -0.07, -0.02, -0.0025}, {}); }
StarDomain wavy() { return StarDomain(0.0, {0.0, 0.0, 0.1}, {}); }

void check_invariants(const StarDomain& d, const Mesh& m) {
  const auto q = mesh_quality(m);
  CHECK(q.min_angle_degrees >= kMinAngleDegrees);
  CHECK(q.min_area > 0.0);
  CHECK(q.euler() == 1);
  int nb = 0;
  for (int i = 0; i < m.num_vertices(); ++i) {
    const Point& p = m.vertices[i];
    if (m.boundary[i]) {
      ++nb;
      const double r = d.radius(std::atan2(p.y(), p.x()));
      CHECK(std::abs(p.norm() - r) <= 1e-12 * r);
    } else {
      CHECK(contains(d, p));
    }
  }
  CHECK(nb >= 8);
}

// Boundary edges: edges used by exactly one triangle.
std::vector<std::pair<int, int>> boundary_edges(const Mesh& m) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++count[{a, b}];
    }
  std::vector<std::pair<int, int>> out;
  for (const auto& [e, c] : count)
    if (c == 1) out.push_back(e);
  return out;
}

}  // namespace

TEST_CASE("unit disk at h = 0.1 has about 380 vertices") {
  const Mesh m = triangulate(StarDomain{}, 0.1);
  CHECK(m.num_vertices() >= 304);
  CHECK(m.num_vertices() <= 456);
  check_invariants(StarDomain{}, m);
}

TEST_CASE("halving h roughly quadruples the vertex count") {
  const Mesh a = triangulate(StarDomain{}, 0.1);
  const Mesh b = triangulate(StarDomain{}, 0.05);
  const double ratio = double(b.num_vertices()) / a.num_vertices();
  CHECK(ratio > 3.4);
  CHECK(ratio < 4.4);
}

TEST_CASE("invariants across domains and sizes") {
  for (const auto& d : {StarDomain{}, dumbbell(), nonconvex(), wavy(), scale_domain(StarDomain{}, 2.0)}) {
    for (double h : {0.2, 0.1, 0.05}) {
      CAPTURE(h);
      check_invariants(d, triangulate(d, h));
    }
  }
}

TEST_CASE("boundary spacing is at most h and every boundary edge joins boundary vertices") {
  const StarDomain d = wavy();
  const double h = 0.07;
  const Mesh m = triangulate(d, h);
  const auto edges = boundary_edges(m);
  int nb = 0;
  for (char b : m.boundary) nb += b;
  CHECK(static_cast<int>(edges.size()) == nb);
  for (const auto& [a, b] : edges) {
    CHECK(m.boundary[a]);
    CHECK(m.boundary[b]);
    CHECK((m.vertices[a] - m.vertices[b]).norm() <= h * (1 + 1e-9));
  }
}

TEST_CASE("total area approaches the domain area") {
  const StarDomain d = wavy();
  // area = (1/2) int r^2 = pi (1 + 0.1^2 / 2)
  const double exact = pi * (1 + 0.005);
  double prev = 1.0;
  for (double h : {0.2, 0.1, 0.05}) {
    const Mesh m = triangulate(d, h);
    double area = 0;
    for (int t = 0; t < m.num_triangles(); ++t) area += m.area(t);
    const double err = std::abs(area - exact) / exact;
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 2e-3);
}

TEST_CASE("degenerate sizes are rejected") {
  CHECK_THROWS_AS(triangulate(StarDomain{}, 2.5), Error);
  CHECK_THROWS_AS(triangulate(StarDomain{}, 0.0), Error);
  CHECK_THROWS_AS(triangulate(StarDomain{}, -0.1), Error);
}

TEST_CASE("triangulation is deterministic") {
  const Mesh a = triangulate(dumbbell(), 0.08);
  const Mesh b = triangulate(dumbbell(), 0.08);
  REQUIRE(a.num_vertices() == b.num_vertices());
  CHECK(a.triangles == b.triangles);
  for (int i = 0; i < a.num_vertices(); ++i) CHECK(a.vertices[i] == b.vertices[i]);
}

TEST_CASE("delaunay of a point set covers the convex hull") {
  std::vector<Point> pts;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 5; ++j) pts.emplace_back(i, j);  // many cocircular quadruples
  const auto tris = delaunay(pts);
  double area = 0;
  for (const auto& t : tris) {
    const Point u = pts[t[1]] - pts[t[0]], v = pts[t[2]] - pts[t[0]];
    const double a = 0.5 * (u.x() * v.y() - u.y() * v.x());
    CHECK(a > 0);
    area += a;
  }
  CHECK(area == doctest::Approx(24.0).epsilon(1e-12));
}

TEST_CASE("structured square mesh") {
  const Mesh m = structured_square_mesh(1.0, 8);
  CHECK(m.num_vertices() == 81 + 64);
  CHECK(m.num_triangles() == 4 * 64);
  const auto q = mesh_quality(m);
  CHECK(q.euler() == 1);
  CHECK(q.min_angle_degrees == doctest::Approx(45.0));
  int nb = 0;
  for (char b : m.boundary) nb += b;
  CHECK(nb == 32);
}

TEST_CASE("radial mapping keeps connectivity and lands on the new boundary") {
  const StarDomain base{};
  const StarDomain target = perturb_domain(base, ChiProfile{0.0, {0.0, 0.0, 1.0}, {}}, 0.05);
  const Mesh m = triangulate(base, 0.1);
  const Mesh mapped = map_mesh_radially(m, base, target);
  CHECK(mapped.triangles == m.triangles);
  CHECK(mapped.boundary == m.boundary);
  for (int i = 0; i < mapped.num_vertices(); ++i) {
    if (!mapped.boundary[i]) continue;
    const Point& p = mapped.vertices[i];
    CHECK(p.norm() == doctest::Approx(target.radius(std::atan2(p.y(), p.x()))).epsilon(1e-12));
  }
  CHECK(mesh_quality(mapped).min_area > 0);
}

TEST_CASE("locator interpolates linear functions exactly") {
  const Mesh m = triangulate(wavy(), 0.1);
  const MeshLocator loc(m);
  std::vector<double> nodal(m.num_vertices());
  for (int i = 0; i < m.num_vertices(); ++i) nodal[i] = 2 * m.vertices[i].x() - m.vertices[i].y() + 0.5;
  for (double x : {-0.6, -0.1, 0.0, 0.3, 0.7}) {
    for (double y : {-0.5, 0.0, 0.2, 0.6}) {
      if (std::hypot(x, y) > 0.85) continue;
      const Point p(x, y);
      const auto hit = loc.locate(p);
      REQUIRE(hit);
      CHECK(loc.interpolate(nodal, *hit) == doctest::Approx(2 * x - y + 0.5).epsilon(1e-12));
    }
  }
  CHECK_FALSE(loc.locate(Point(3.0, 0.0)));
  CHECK(loc.locate_nearest(Point(1.1 * 1.0, 0.0), 0.3));
}
