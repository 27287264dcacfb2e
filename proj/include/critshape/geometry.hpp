#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

namespace critshape {

using Point = Eigen::Vector2d;

// A star-shaped planar domain {rho (cos t, sin t) : 0 <= rho < r(t)} whose
// radial function is r(t) = 1 + chi(t), with chi a truncated Fourier series
//   chi(t) = a0 + sum_m (a_m cos(m t) + b_m sin(m t)),   m = 1..M.
// The boundary is always traversed counterclockwise.
class StarDomain {
 public:
  StarDomain() = default;  // unit disk
  StarDomain(double a0, std::vector<double> a, std::vector<double> b);

  static StarDomain disk(double radius);

  double a0() const { return a0_; }
  const std::vector<double>& a() const { return a_; }
  const std::vector<double>& b() const { return b_; }
  int modes() const { return static_cast<int>(a_.size()); }

  // d^order r / dt^order, order in [0, 4] (higher orders are also exact).
  double radius(double theta, int order = 0) const;
  // d^order chi / dt^order.
  double chi(double theta, int order = 0) const;

  Point boundary_point(double theta) const;
  double speed(double theta) const;  // |d gamma / dt|

  double min_radius(int samples = 2048) const;
  double max_radius(int samples = 2048) const;
  double diameter() const;
  double perimeter() const;

  // Angles whose boundary points are equally spaced in arc length.
  std::vector<double> arclength_angles(int count) const;

  friend bool operator==(const StarDomain&, const StarDomain&) = default;

 private:
  double a0_ = 0.0;
  std::vector<double> a_;
  std::vector<double> b_;
};

struct BoundaryFrame {
  Point point;
  Point tangent;  // unit, counterclockwise
  Point normal;   // unit, outward: (t_y, -t_x)
  double curvature = 0.0;
};

BoundaryFrame boundary_frame(const StarDomain& domain, double theta);

// Signed curvature of the polar curve r(t).
double polar_curvature(double r, double dr, double ddr);

// Winding number of a closed polyline (last vertex joins the first) about z.
// Throws PointOnBoundary if z is within `tol` of the polyline.
int winding_number(std::span<const Point> polyline, const Point& z, double tol = 1e-12);
int winding_number(const StarDomain& domain, const Point& z);

// Relative boundary band used by `contains` and `winding_number`.
inline constexpr double kContainmentBand = 1e-12;

bool contains(const StarDomain& domain, const Point& z);

// max_{j <= k} sup_t |d^j (chi_A - chi_B) / dt^j|.
double chi_distance(const StarDomain& a, const StarDomain& b, int k);

struct ConvexityReport {
  bool convex = false;
  double min_curvature = 0.0;
  double argmin_theta = 0.0;
};

inline constexpr double kConvexityTol = 1e-10;

ConvexityReport is_convex(const StarDomain& domain, double tol = kConvexityTol);

// Dilation {z : z / rho in domain}.
StarDomain scale_domain(const StarDomain& domain, double rho);

// A perturbation of the radial function, chi(theta) = a0 + sum a_m cos m theta
// + b_m sin m theta. Unlike a StarDomain it need not be positive.
struct ChiProfile {
  double a0 = 0.0;
  std::vector<double> a;
  std::vector<double> b;
  double operator()(double theta) const;
};

// r_base + amplitude * chi. Throws InvalidArgument if the result is not
// positive.
StarDomain perturb_domain(const StarDomain& base, const ChiProfile& profile, double amplitude);

void to_json(nlohmann::json& j, const ChiProfile& p);
void from_json(const nlohmann::json& j, ChiProfile& p);

// Closed counterclockwise polyline with `count` vertices on the boundary.
std::vector<Point> boundary_polyline(const StarDomain& domain, int count);

// Minimizes (or maximizes) a smooth periodic function of the angle by dense
// sampling followed by golden-section refinement of the best sample.
struct AngleExtremum {
  double theta = 0.0;
  double value = 0.0;
};
template <class F>
AngleExtremum minimize_periodic(F&& fn, int samples);

void to_json(nlohmann::json& j, const StarDomain& d);
void from_json(const nlohmann::json& j, StarDomain& d);
StarDomain load_domain(const std::string& path);

}  // namespace critshape

#include "critshape/detail/periodic_min.hpp"
