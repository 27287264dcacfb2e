#include "critshape/hypotheses.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "critshape/error.hpp"

namespace critshape {

namespace {

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

nlohmann::json point_json(const Point& p) { return {p.x(), p.y()}; }

}  // namespace

std::vector<Point> halton_interior_points(const StarDomain& domain, int count, std::uint64_t offset) {
  const double r = domain.max_radius();
  std::vector<Point> points;
  points.reserve(count);
  for (std::uint64_t i = offset + 1; static_cast<int>(points.size()) < count; ++i) {
    const Point p(r * (2.0 * radical_inverse(i, 2) - 1.0), r * (2.0 * radical_inverse(i, 3) - 1.0));
    if (contains(domain, p)) points.push_back(p);
  }
  return points;
}

double hp3_margin(const ScalarField& f, const BoundaryFrame& frame) {
  return 0.5 * normal_derivative(f, frame) + frame.curvature * f(frame.point);
}

HypothesisReport check_hypotheses(const StarDomain& domain, const ScalarField& f, int n_interior, int n_boundary,
                                  double tol, std::uint64_t seed) {
  if (n_interior < 16) throw Error(ErrorKind::InvalidArgument, "need at least 16 interior samples");
  const auto interior = halton_interior_points(domain, n_interior, seed);
  return check_hypotheses(domain, f, interior, n_boundary, tol);
}

HypothesisReport check_hypotheses(const StarDomain& domain, const ScalarField& f,
                                  std::span<const Point> interior, int n_boundary, double tol) {
  if (interior.size() < 16 || n_boundary < 16)
    throw Error(ErrorKind::InvalidArgument, "need at least 16 interior and 16 boundary samples");
  HypothesisReport report;
  report.n_interior = static_cast<int>(interior.size());
  report.n_boundary = n_boundary;
  report.tol = tol;

  auto& pos = report.positivity;
  pos.min_value = std::numeric_limits<double>::infinity();
  auto& hp2 = report.hp2;
  for (const Point& z : interior) {
    const Jet j = f.eval_jet(z);
    if (j.value < pos.min_value) {
      pos.min_value = j.value;
      pos.argmin = z;
    }
    if (j.value <= 0.0) continue;
    const double defect = std::abs(j.value * j.hessian.trace() - j.gradient.squaredNorm()) / (j.value * j.value);
    if (defect > hp2.max_defect) {
      hp2.max_defect = defect;
      hp2.argmax = z;
    }
  }

  auto& hp3 = report.hp3;
  hp3.min_margin = std::numeric_limits<double>::infinity();
  hp3.samples.reserve(n_boundary);
  for (int k = 0; k < n_boundary; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n_boundary;
    const auto frame = boundary_frame(domain, theta);
    const double value = f(frame.point);
    if (value < pos.min_value) {
      pos.min_value = value;
      pos.argmin = frame.point;
    }
    const double m = hp3_margin(f, frame);
    hp3.samples.push_back({theta, m});
    if (m < hp3.min_margin) {
      hp3.min_margin = m;
      hp3.argmin_theta = theta;
      hp3.argmin = frame.point;
    }
  }
  pos.pass = pos.min_value > 0.0;
  hp2.pass = pos.pass && hp2.max_defect <= tol;
  hp3.pass = hp3.min_margin >= -tol;
  return report;
}

double dom_exp_margin(const StarDomain& domain, double theta) {
  const auto frame = boundary_frame(domain, theta);
  return frame.normal.x() + frame.curvature;
}

void to_json(nlohmann::json& j, const HypothesisReport& r) {
  nlohmann::json margins = nlohmann::json::array();
  for (const auto& s : r.hp3.samples) margins.push_back({s.theta, s.margin});
  j = {
      {"pass", r.pass()},
      {"positivity", {{"min_value", r.positivity.min_value}, {"argmin", point_json(r.positivity.argmin)},
                      {"pass", r.positivity.pass}}},
      {"hp2", {{"max_relative_defect", r.hp2.max_defect}, {"argmax", point_json(r.hp2.argmax)},
               {"pass", r.hp2.pass}}},
      {"hp3", {{"min_margin", r.hp3.min_margin}, {"argmin_theta", r.hp3.argmin_theta},
               {"argmin", point_json(r.hp3.argmin)}, {"pass", r.hp3.pass}, {"margins", margins}}},
      {"n_interior", r.n_interior},
      {"n_boundary", r.n_boundary},
      {"tol", r.tol},
  };
}

}  // namespace critshape
