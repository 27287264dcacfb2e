#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "critshape/conformal.hpp"
#include "critshape/error.hpp"

using namespace critshape;
using std::numbers::e;
using std::numbers::pi;

namespace {

const ConformalMap& exp_map() {
  static const ConformalMap map(StarDomain{}, ScalarField("exp(2*x)"));
  return map;
}

}  // namespace

TEST_CASE("constant modulus gives a dilation") {
  const ConformalMap id(StarDomain{}, ScalarField("1"));
  const ConformalMap two(StarDomain{}, ScalarField("4"));
  for (const Point& z : {Point(0.3, 0.4), Point(-0.5, 0.2), Point(0, 0)}) {
    CHECK(std::abs(id(z) - to_complex(z)) < 1e-15);
    CHECK(std::abs(two(z) - 2.0 * to_complex(z)) < 1e-14);
  }
  CHECK(two.derivative(Point(0, 0)) == Complex(2.0, 0.0));
}

TEST_CASE("exp(2x) gives exp(z) - 1") {
  const auto& map = exp_map();
  CHECK(std::abs(map(Point(1, 0)) - (e - 1)) < 1e-13);
  CHECK(map(Point(0, 0)) == Complex(0.0, 0.0));
  CHECK(map.derivative(Point(0, 0)) == Complex(1.0, 0.0));
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (int i = 0; i < 20; ++i) {
    const Point z(u(rng), u(rng));
    const Complex zc = to_complex(z);
    const auto j = map.jet(z);
    CHECK(std::abs(j.value - (std::exp(zc) - 1.0)) < 1e-13);
    CHECK(std::abs(j.derivative - std::exp(zc)) < 1e-13);
    CHECK(std::abs(j.second - std::exp(zc)) < 1e-13);
    CHECK(j.conjugate == doctest::Approx(z.y()).epsilon(1e-13));
  }
}

TEST_CASE("modulus identity, path independence and Cauchy-Riemann") {
  const ConformalMap map(StarDomain(0.0, {0.0, 0.0, 0.1}, {}), ScalarField("exp(x - 0.5*y)*(x^2+y^2+1)^0"));
  const ConformalMap harmonic(StarDomain{}, ScalarField("exp(2*(x^2 - y^2))"));
  for (const ConformalMap* m : {&map, &harmonic}) {
    const auto pts = halton_interior_points(m->domain(), 200);
    double worst_mod = 0.0, worst_path = 0.0, worst_cr = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      worst_mod = std::max(worst_mod, modulus_residual(*m, pts[i]));
      if (i % 10 == 0) {
        worst_path = std::max(worst_path, path_independence_residual(*m, pts[i]));
        worst_cr = std::max(worst_cr, cauchy_riemann_residual(*m, pts[i] * 0.9));
      }
    }
    CHECK(worst_mod < 1e-8);
    CHECK(worst_path < 1e-11);
    CHECK(worst_cr < 1e-6);
  }
}

TEST_CASE("holomorphic non-exponential case: f = |2z|^2 shifted") {
  // T' = (z + 2)^2 has modulus^2 = |z+2|^4, log-harmonic away from -2
  const ConformalMap map(StarDomain{}, ScalarField("((x+2)^2 + y^2)^2"));
  for (const Point& z : {Point(0.5, 0.3), Point(-0.6, -0.2)}) {
    const Complex zc = to_complex(z);
    const Complex exact = (std::pow(zc + 2.0, 3) - 8.0) / 3.0 / 4.0;
    // normalization: T'(0) = |f(0)|^{1/2} = 4 is real, matching (z+2)^2 at 0
    CHECK(std::abs(map(z) - exact * 4.0) < 1e-12);
  }
}

TEST_CASE("build errors") {
  try {
    ConformalMap(StarDomain{}, ScalarField("1 + x^2"));
    FAIL("expected Hp2Violated");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::Hp2Violated);
  }
  try {
    ConformalMap(StarDomain{}, ScalarField("x + 0.5"));
    FAIL("expected NonpositiveField");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::NonpositiveField);
  }
}

TEST_CASE("image curvature") {
  const ConformalMap id(StarDomain{}, ScalarField("1"));
  const ConformalMap two(StarDomain{}, ScalarField("4"));
  for (double t : {0.0, 1.0, 4.0}) {
    CHECK(image_curvature(id, t).curvature == doctest::Approx(1.0));
    CHECK(image_curvature(two, t).curvature == doctest::Approx(0.5));
  }
  const auto k0 = image_curvature(exp_map(), 0.0);
  CHECK(k0.curvature == doctest::Approx(2.0 / e).epsilon(1e-12));
  for (int i = 0; i < 64; ++i) {
    const double t = 2 * pi * i / 64;
    const auto k = image_curvature(exp_map(), t);
    CHECK(std::abs(k.curvature - k.curvature_alt) < 1e-8);
    const double c = std::cos(t);
    CHECK(k.curvature == doctest::Approx((c + 1) * std::exp(-c)).epsilon(1e-12));
  }
}

TEST_CASE("image curvature matches the curvature of the image polyline") {
  // independent check: discrete curvature of T(boundary) by finite differences
  const auto& map = exp_map();
  for (double t : {0.3, 1.7, 2.9}) {
    const double h = 1e-3;
    auto img = [&](double s) { return to_point(map(map.domain().boundary_point(s))); };
    const Point d1 = (img(t + h) - img(t - h)) / (2 * h);
    const Point d2 = (img(t + h) - 2 * img(t) + img(t - h)) / (h * h);
    const double k = (d1.x() * d2.y() - d1.y() * d2.x()) / std::pow(d1.norm(), 3);
    CHECK(image_curvature(map, t).curvature == doctest::Approx(k).epsilon(1e-5));
  }
}

TEST_CASE("tangential identity") {
  const ConformalMap id(StarDomain{}, ScalarField("1"));
  CHECK(tangential_identity_residual(id, 0.4) == 0.0);
  CHECK(tangential_identity_residual(exp_map(), pi / 2) < 1e-15);
  CHECK(tangential_identity_residual(exp_map(), 0.0) < 1e-15);
  const ConformalMap wavy(StarDomain(0.0, {0.0, 0.0, 0.3}, {}), ScalarField("exp(2*x)"));
  for (int i = 0; i < 32; ++i) CHECK(tangential_identity_residual(wavy, 0.2 * i) < 1e-12);
}

TEST_CASE("injectivity") {
  const ConformalMap id(StarDomain{}, ScalarField("1"));
  CHECK(check_injectivity(id, 256).injective);
  const ConformalMap r2(StarDomain::disk(2.0), ScalarField("exp(2*x)"));
  CHECK(check_injectivity(r2, 512).injective);
  const ConformalMap r4(StarDomain::disk(4.0), ScalarField("exp(2*x)"));
  const auto rep = check_injectivity(r4, 512);
  CHECK_FALSE(rep.injective);
  CHECK(rep.self_intersections > 0);
}

TEST_CASE("inverse") {
  const ConformalMap id(StarDomain{}, ScalarField("1"));
  const Point p = inverse(id, Complex(0.3, 0.4));
  CHECK(p.x() == doctest::Approx(0.3));
  CHECK(p.y() == doctest::Approx(0.4));

  const auto& map = exp_map();
  const Point one = inverse(map, Complex(e - 1, 0.0));
  CHECK(std::abs(one.x() - 1.0) < 1e-10);
  CHECK(std::abs(one.y()) < 1e-10);
  const Point zero = inverse(map, Complex(0.0, 0.0));
  CHECK(zero.norm() < 1e-14);

  try {
    inverse(map, Complex(5.0, 0.0));
    FAIL("expected OutsideImage");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::OutsideImage);
  }
}

TEST_CASE("round trip on random interior points") {
  const ConformalMap map(StarDomain(0.0, {0.0, 0.0, 0.1}, {}), ScalarField("exp(2*x)"));
  std::mt19937 rng(99);
  const auto pts = halton_interior_points(map.domain(), 100, 1000);
  double worst = 0.0;
  for (const auto& z : pts) {
    const Complex zeta = map(z);
    // the guess is a poor start on purpose
    const Point back = inverse(map, zeta, Point(0, 0));
    CHECK(std::abs(map(back) - zeta) <= kInverseTol * (1 + std::abs(zeta)));
    worst = std::max(worst, (back - z).norm());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("image as a star domain") {
  double err = 1.0;
  const auto img = image_star_domain(exp_map(), 64, &err);
  CHECK(err < 1e-9);
  CHECK(img.radius(0.0) == doctest::Approx(e - 1).epsilon(1e-9));
  CHECK(img.radius(pi) == doctest::Approx(1 - 1 / e).epsilon(1e-9));
  CHECK(is_convex(img).convex);

  const ConformalMap two(StarDomain{}, ScalarField("4"));
  const auto disk2 = image_star_domain(two, 8);
  CHECK(chi_distance(disk2, StarDomain::disk(2.0), 2) < 1e-12);
}
