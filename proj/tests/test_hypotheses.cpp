#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "critshape/error.hpp"
#include "critshape/hypotheses.hpp"

using namespace critshape;
using std::numbers::pi;

namespace {
const StarDomain kWavy(0.0, {0.0, 0.0, 0.3}, {});
}

TEST_CASE("torsion on the unit disk satisfies everything") {
  const auto r = check_hypotheses(StarDomain{}, ScalarField("1"), 256, 64);
  CHECK(r.positivity.min_value == 1.0);
  CHECK(r.positivity.pass);
  CHECK(r.hp2.max_defect == 0.0);
  CHECK(r.hp2.pass);
  for (const auto& s : r.hp3.samples) CHECK(s.margin == doctest::Approx(1.0));
  CHECK(r.hp3.pass);
  CHECK(r.pass());
  CHECK(r.n_interior == 256);
  CHECK(r.n_boundary == 64);
}

TEST_CASE("exp(2x) on the unit disk: analytic margin") {
  const auto r = check_hypotheses(StarDomain{}, ScalarField("exp(2*x)"), 512, 128);
  CHECK(r.hp2.max_defect < 1e-14);
  CHECK(r.hp2.pass);
  for (const auto& s : r.hp3.samples) {
    const double c = std::cos(s.theta);
    CHECK(s.margin == doctest::Approx((c + 1) * std::exp(2 * c)).epsilon(1e-12));
  }
  CHECK(r.hp3.min_margin == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.hp3.argmin_theta == doctest::Approx(pi));
  CHECK(r.pass());
}

TEST_CASE("exp(2x) on the three-lobed domain violates hp3") {
  const auto r = check_hypotheses(kWavy, ScalarField("exp(2*x)"), 256, 384);
  CHECK(r.hp2.pass);
  CHECK_FALSE(r.hp3.pass);
  CHECK(r.hp3.min_margin < 0.0);
  // the witness is a boundary point of the domain
  const double t = std::atan2(r.hp3.argmin.y(), r.hp3.argmin.x());
  CHECK(r.hp3.argmin.norm() == doctest::Approx(kWavy.radius(t)));
  const auto frame = boundary_frame(kWavy, pi / 3);
  const double m = hp3_margin(ScalarField("exp(2*x)"), frame);
  CHECK(m < 0.0);
  CHECK(m == doctest::Approx(std::exp(2 * frame.point.x()) * (frame.normal.x() + frame.curvature)));
}

TEST_CASE("witness points lie in the closed domain") {
  const auto r = check_hypotheses(kWavy, ScalarField("1 + x^2 + 0.3*y"), 256, 128);
  CHECK(contains(kWavy, r.positivity.argmin * (1 - 1e-9)));
  CHECK(contains(kWavy, r.hp2.argmax));
  CHECK_FALSE(r.hp2.pass);
}

TEST_CASE("dom_exp margin") {
  CHECK(dom_exp_margin(StarDomain{}, pi) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(dom_exp_margin(StarDomain{}, 0.0) == doctest::Approx(2.0));
  CHECK(dom_exp_margin(kWavy, pi / 3) < 0.0);
  CHECK(dom_exp_margin(kWavy, pi / 3) == doctest::Approx(0.5 - 4.081632653061).epsilon(1e-6));
}

TEST_CASE("hp3 margin sign agrees with dom_exp margin for exp(2x)") {
  const StarDomain nonconvex(-0.2875, {-0.14, -0.07, -0.02, -0.0025}, {});
  const auto r = check_hypotheses(nonconvex, ScalarField("exp(2*x)"), 64, 512);
  for (const auto& s : r.hp3.samples) {
    const double d = dom_exp_margin(nonconvex, s.theta);
    CHECK((s.margin >= 0) == (d >= 0));
  }
  CHECK(r.pass());
  CHECK_FALSE(is_convex(nonconvex).convex);
}

TEST_CASE("monotonicity in tolerance and sample count") {
  const ScalarField f("exp(2*x)");
  for (int n : {16, 64, 256}) {
    const auto coarse = check_hypotheses(kWavy, f, 64, n);
    const auto fine = check_hypotheses(kWavy, f, 64, 2 * n);
    if (!coarse.hp3.pass) CHECK_FALSE(fine.hp3.pass);
    CHECK(fine.hp3.min_margin <= coarse.hp3.min_margin);
  }
  const ScalarField g("1 + 0.01*x^2");
  bool passed = false;
  for (double tol : {1e-8, 1e-6, 1e-4, 1e-2, 1.0}) {
    const bool p = check_hypotheses(StarDomain{}, g, 128, 64, tol).hp2.pass;
    if (passed) CHECK(p);
    passed = passed || p;
  }
  CHECK(passed);
}

TEST_CASE("scaling f by a constant does not change verdicts") {
  for (const char* expr : {"exp(2*x)", "1 + x^2", "exp(x - y)"}) {
    const ScalarField f(expr), cf(std::string("7.5*(") + expr + ")");
    for (const auto& d : {StarDomain{}, kWavy}) {
      const auto a = check_hypotheses(d, f, 128, 128);
      const auto b = check_hypotheses(d, cf, 128, 128);
      CHECK(a.hp2.pass == b.hp2.pass);
      CHECK(a.hp3.pass == b.hp3.pass);
      CHECK(b.hp3.min_margin == doctest::Approx(7.5 * a.hp3.min_margin));
    }
  }
}

TEST_CASE("nonpositive fields and singular expressions") {
  const auto r = check_hypotheses(StarDomain{}, ScalarField("x"), 64, 32);
  CHECK_FALSE(r.positivity.pass);
  CHECK_FALSE(r.pass());
  try {
    check_hypotheses(StarDomain{}, ScalarField("log(x)"), 64, 32);
    FAIL("expected DomainError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DomainError);
  }
  CHECK_THROWS_AS(check_hypotheses(StarDomain{}, ScalarField("1"), 8, 32), Error);
}

TEST_CASE("halton points are deterministic and inside") {
  const auto a = halton_interior_points(kWavy, 100);
  const auto b = halton_interior_points(kWavy, 100);
  CHECK(a == b);
  for (const auto& p : a) CHECK(contains(kWavy, p));
  CHECK(halton_interior_points(kWavy, 100, 17) != a);
}
