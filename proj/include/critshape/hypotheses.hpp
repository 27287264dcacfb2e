#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "critshape/field.hpp"
#include "critshape/geometry.hpp"

namespace critshape {

inline constexpr double kHp2Tol = 1e-8;

struct PositivityCheck {
  double min_value = 0.0;
  Point argmin = Point::Zero();
  bool pass = false;
};

// hp2: relative log-Laplacian defect |f lap f - |grad f|^2| / f^2 on interior samples.
struct Hp2Check {
  double max_defect = 0.0;
  Point argmax = Point::Zero();
  bool pass = false;
};

struct MarginSample {
  double theta = 0.0;
  double margin = 0.0;
};

// hp3: boundary margin m(t) = f_nu / 2 + K f.
struct Hp3Check {
  std::vector<MarginSample> samples;
  double min_margin = 0.0;
  double argmin_theta = 0.0;
  Point argmin = Point::Zero();
  bool pass = false;
};

struct HypothesisReport {
  PositivityCheck positivity;
  Hp2Check hp2;
  Hp3Check hp3;
  int n_interior = 0;
  int n_boundary = 0;
  double tol = kHp2Tol;

  bool pass() const { return positivity.pass && hp2.pass && hp3.pass; }
};

// Quasi-random interior points: the 2D Halton sequence (bases 2, 3) over the
// bounding box, filtered by containment, starting at index `offset + 1`.
std::vector<Point> halton_interior_points(const StarDomain& domain, int count, std::uint64_t offset = 0);

double hp3_margin(const ScalarField& f, const BoundaryFrame& frame);

HypothesisReport check_hypotheses(const StarDomain& domain, const ScalarField& f, int n_interior, int n_boundary,
                                  double tol = kHp2Tol, std::uint64_t seed = 0);

// Same check over caller-supplied interior points (e.g. mesh vertices).
HypothesisReport check_hypotheses(const StarDomain& domain, const ScalarField& f,
                                  std::span<const Point> interior, int n_boundary, double tol = kHp2Tol);

// nu_x + K, the sign of the hp3 margin for f = exp(2x).
double dom_exp_margin(const StarDomain& domain, double theta);

void to_json(nlohmann::json& j, const HypothesisReport& r);

}  // namespace critshape
