#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "critshape/error.hpp"
#include "critshape/geometry.hpp"

#include <nlohmann/json.hpp>

using namespace critshape;
using std::numbers::pi;

namespace {

StarDomain wavy3(double eps = 0.3) { return StarDomain(0.0, {0.0, 0.0, eps}, {}); }

// Curvature of the Cartesian curve t -> r(t)(cos t, sin t) from central
// differences of the curve itself; never touches the polar formula.
double curvature_oracle(const StarDomain& d, double t) {
  const double h = 1e-4;
  auto p = [&](double s) { return d.boundary_point(s); };
  const Point d1 = (p(t + h) - p(t - h)) / (2 * h);
  const Point d2 = (p(t + h) - 2 * p(t) + p(t - h)) / (h * h);
  return (d1.x() * d2.y() - d1.y() * d2.x()) / std::pow(d1.norm(), 3);
}

StarDomain random_domain(std::mt19937& rng, int modes, double amp) {
  std::uniform_real_distribution<double> u(-amp, amp);
  std::vector<double> a(modes), b(modes);
  for (int m = 0; m < modes; ++m) {
    a[m] = u(rng) / (m + 1);
    b[m] = u(rng) / (m + 1);
  }
  return StarDomain(u(rng), a, b);
}

}  // namespace

TEST_CASE("boundary frame on circles") {
  const auto f = boundary_frame(StarDomain{}, 0.0);
  CHECK(f.point.x() == doctest::Approx(1.0));
  CHECK(f.point.y() == doctest::Approx(0.0));
  CHECK(f.tangent.x() == doctest::Approx(0.0));
  CHECK(f.tangent.y() == doctest::Approx(1.0));
  CHECK(f.normal.x() == doctest::Approx(1.0));
  CHECK(f.normal.y() == doctest::Approx(0.0));
  CHECK(f.curvature == doctest::Approx(1.0));

  const StarDomain two(1.0, {}, {});
  for (double t : {0.0, 0.7, 2.0, 5.5}) CHECK(boundary_frame(two, t).curvature == doctest::Approx(0.5));
}

TEST_CASE("polar curvature matches a finite-difference oracle") {
  const auto d = wavy3();
  const double oracle = curvature_oracle(d, pi / 3);
  const double k = boundary_frame(d, pi / 3).curvature;
  CHECK(k == doctest::Approx(oracle).epsilon(1e-6));
  // (0.49 - 0.7*2.7) / 0.49^1.5
  CHECK(k == doctest::Approx(-4.081632653061).epsilon(1e-10));

  std::mt19937 rng(7);
  for (int i = 0; i < 10; ++i) {
    const auto rd = random_domain(rng, 4, 0.15);
    const double t = 0.61 * i;
    CHECK(boundary_frame(rd, t).curvature == doctest::Approx(curvature_oracle(rd, t)).epsilon(1e-5));
  }
}

TEST_CASE("frame orthonormality and outward normal") {
  std::mt19937 rng(11);
  for (int i = 0; i < 20; ++i) {
    const auto d = random_domain(rng, 5, 0.2);
    for (int k = 0; k < 16; ++k) {
      const double t = 2 * pi * k / 16 + 0.1;
      const auto f = boundary_frame(d, t);
      CHECK(f.tangent.norm() == doctest::Approx(1.0));
      CHECK(std::abs(f.tangent.dot(f.normal)) < 1e-14);
      const double s = 1e-4;
      CHECK_FALSE(contains(d, f.point + s * f.normal));
      CHECK(contains(d, f.point - s * f.normal));
    }
  }
}

TEST_CASE("total curvature is 2 pi") {
  std::mt19937 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto d = random_domain(rng, 6, 0.3);
    const int n = 8192;
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      const double t = 2 * pi * k / n;
      total += boundary_frame(d, t).curvature * d.speed(t);
    }
    total *= 2 * pi / n;
    CHECK(std::abs(total - 2 * pi) / (2 * pi) < 1e-6);
  }
}

TEST_CASE("winding number") {
  auto circle = boundary_polyline(StarDomain{}, 128);
  CHECK(winding_number(circle, Point(0, 0)) == 1);
  CHECK(winding_number(circle, Point(2, 0)) == 0);
  std::vector<Point> reversed(circle.rbegin(), circle.rend());
  CHECK(winding_number(reversed, Point(0, 0)) == -1);
  CHECK_THROWS_AS(winding_number(circle, circle[5]), Error);

  CHECK(winding_number(StarDomain{}, Point(0, 0)) == 1);
  CHECK(winding_number(StarDomain{}, Point(2, 0)) == 0);
  try {
    winding_number(StarDomain{}, Point(1, 0));
    FAIL("expected PointOnBoundary");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PointOnBoundary);
  }
}

TEST_CASE("winding number is refinement invariant") {
  const auto d = wavy3(0.25);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.4, 1.4);
  for (int i = 0; i < 50; ++i) {
    const Point z(u(rng), u(rng));
    const double rz = d.radius(std::atan2(z.y(), z.x()));
    if (std::abs(z.norm() - rz) < 0.05) continue;
    const int coarse = winding_number(boundary_polyline(d, 256), z);
    const int fine = winding_number(boundary_polyline(d, 1024), z);
    CHECK(coarse == fine);
    CHECK(coarse == (contains(d, z) ? 1 : 0));
  }
}

TEST_CASE("containment") {
  CHECK(contains(StarDomain{}, Point(0.5, 0)));
  CHECK_FALSE(contains(StarDomain{}, Point(1.5, 0)));
  const auto d = wavy3();
  CHECK(d.radius(pi / 3) == doctest::Approx(0.7));
  CHECK_FALSE(contains(d, 0.71 * Point(std::cos(pi / 3), std::sin(pi / 3))));
  CHECK(contains(d, 0.69 * Point(std::cos(pi / 3), std::sin(pi / 3))));
}

TEST_CASE("chi distance") {
  const StarDomain zero{};
  const StarDomain shifted(0.1, {}, {});
  CHECK(chi_distance(zero, shifted, 0) == doctest::Approx(0.1));
  const auto d = wavy3(0.2);
  for (int k = 0; k <= 4; ++k) CHECK(chi_distance(d, d, k) == 0.0);
  const double eps = 0.05;
  CHECK(chi_distance(zero, wavy3(eps), 1) == doctest::Approx(3 * eps).epsilon(1e-10));
  CHECK(chi_distance(zero, wavy3(eps), 2) == doctest::Approx(9 * eps).epsilon(1e-10));
  CHECK_THROWS_AS(chi_distance(zero, d, 5), Error);
}

TEST_CASE("chi distance is a metric") {
  std::mt19937 rng(13);
  for (int i = 0; i < 30; ++i) {
    const auto a = random_domain(rng, 4, 0.2), b = random_domain(rng, 4, 0.2), c = random_domain(rng, 4, 0.2);
    for (int k : {0, 2}) {
      const double ab = chi_distance(a, b, k), ba = chi_distance(b, a, k);
      CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
      CHECK(chi_distance(a, c, k) <= ab + chi_distance(b, c, k) + 1e-12);
      CHECK(ab > 0.0);
    }
  }
}

TEST_CASE("convexity") {
  const auto disk = is_convex(StarDomain{});
  CHECK(disk.convex);
  CHECK(disk.min_curvature == doctest::Approx(1.0));

  const auto wavy = is_convex(wavy3());
  CHECK_FALSE(wavy.convex);
  CHECK(wavy.min_curvature == doctest::Approx(-4.081632653061).epsilon(1e-9));
  const double period = 2 * pi / 3;
  const double phase = std::fmod(wavy.argmin_theta - pi / 3 + 2 * pi, period);
  CHECK(std::min(phase, period - phase) < 1e-6);

  const auto ellipse = is_convex(StarDomain(0.0, {0.0, 0.05}, {}));
  CHECK(ellipse.convex);
  CHECK(ellipse.min_curvature > 0.0);
}

TEST_CASE("scaling") {
  const auto two = scale_domain(StarDomain{}, 2.0);
  CHECK(two.radius(1.0) == doctest::Approx(2.0));
  CHECK(two.modes() == 0);
  const auto d = wavy3();
  CHECK(scale_domain(d, 1.0) == d);
  CHECK(boundary_frame(scale_domain(d, 2.0), pi / 3).curvature == doctest::Approx(-2.0408163265306).epsilon(1e-10));
  CHECK_THROWS_AS(scale_domain(d, 0.0), Error);
  CHECK_THROWS_AS(scale_domain(d, -1.0), Error);

  const auto once = scale_domain(d, 0.6 * 1.7);
  const auto twice = scale_domain(scale_domain(d, 0.6), 1.7);
  CHECK(chi_distance(once, twice, 4) < 1e-12);
}

TEST_CASE("construction rejects nonpositive radius") {
  CHECK_THROWS_AS(StarDomain(0.0, {1.2}, {}), Error);
  CHECK_THROWS_AS(StarDomain::disk(0.0), Error);
}

TEST_CASE("arc-length sampling is equally spaced") {
  const auto d = wavy3(0.2);
  const auto angles = d.arclength_angles(200);
  const double expected = d.perimeter() / 200;
  double worst = 0.0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double t0 = angles[i], t1 = i + 1 < angles.size() ? angles[i + 1] : angles[0] + 2 * pi;
    // arc length between consecutive samples by fine trapezoid
    double s = 0.0;
    const int n = 200;
    for (int k = 0; k <= n; ++k) s += (k == 0 || k == n ? 0.5 : 1.0) * d.speed(t0 + (t1 - t0) * k / n);
    s *= (t1 - t0) / n;
    worst = std::max(worst, std::abs(s - expected));
  }
  CHECK(worst < 1e-6 * expected);
}

TEST_CASE("json round trip") {
  const StarDomain d(0.05, {0.1, 0.0, 0.02}, {0.0, -0.03});
  nlohmann::json j = d;
  CHECK(j.at("a0").get<double>() == 0.05);
  CHECK(j.get<StarDomain>() == d);
}

TEST_CASE("perturbation profiles") {
  const ChiProfile p{0.1, {0.0, 0.0, 1.0}, {0.5}};
  CHECK(p(0.3) == doctest::Approx(0.1 + std::cos(0.9) + 0.5 * std::sin(0.3)));
  const StarDomain base(0.0, {0.2}, {});
  const StarDomain d = perturb_domain(base, p, 0.05);
  for (double t : {0.0, 1.0, 2.5, 4.0})
    CHECK(d.radius(t) == doctest::Approx(base.radius(t) + 0.05 * p(t)));
  CHECK(chi_distance(d, base, 0) == doctest::Approx(0.05 * 1.6).epsilon(0.02));
  CHECK(perturb_domain(base, p, 0.0) == base);
  CHECK_THROWS_AS(perturb_domain(StarDomain{}, ChiProfile{0.0, {0.0, 0.0, 1.0}, {}}, 1.0), Error);

  nlohmann::json j = p;
  const auto q = j.get<ChiProfile>();
  CHECK(q.a0 == p.a0);
  CHECK(q.a == p.a);
  CHECK(q.b == p.b);
  CHECK(nlohmann::json::parse(R"({"a": [0, 1]})").get<ChiProfile>()(0.0) == doctest::Approx(1.0));
}
