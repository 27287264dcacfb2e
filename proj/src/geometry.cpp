#include "critshape/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "critshape/error.hpp"

namespace critshape {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// d^k/dt^k of cos(m t) and sin(m t)
double dcos(int m, int k, double t) { return std::pow(m, k) * std::cos(m * t + k * std::numbers::pi / 2); }
double dsin(int m, int k, double t) { return std::pow(m, k) * std::sin(m * t + k * std::numbers::pi / 2); }

double distance_to_segment(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (a + s * ab - p).norm();
}

}  // namespace

StarDomain::StarDomain(double a0, std::vector<double> a, std::vector<double> b)
    : a0_(a0), a_(std::move(a)), b_(std::move(b)) {
  const auto m = std::max(a_.size(), b_.size());
  a_.resize(m, 0.0);
  b_.resize(m, 0.0);
  while (!a_.empty() && a_.back() == 0.0 && b_.back() == 0.0) {
    a_.pop_back();
    b_.pop_back();
  }
  if (!std::isfinite(a0_)) throw Error(ErrorKind::InvalidArgument, "non-finite Fourier coefficient");
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (!std::isfinite(a_[i]) || !std::isfinite(b_[i]))
      throw Error(ErrorKind::InvalidArgument, "non-finite Fourier coefficient");
  }
  if (min_radius() <= 0.0)
    throw Error(ErrorKind::InvalidArgument, "radial function must be strictly positive");
}

StarDomain StarDomain::disk(double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "disk radius must be positive");
  return StarDomain(radius - 1.0, {}, {});
}

double StarDomain::chi(double theta, int order) const {
  double v = order == 0 ? a0_ : 0.0;
  for (int m = 1; m <= modes(); ++m) {
    v += a_[m - 1] * dcos(m, order, theta) + b_[m - 1] * dsin(m, order, theta);
  }
  return v;
}

double StarDomain::radius(double theta, int order) const {
  return (order == 0 ? 1.0 : 0.0) + chi(theta, order);
}

Point StarDomain::boundary_point(double theta) const {
  const double r = radius(theta);
  return {r * std::cos(theta), r * std::sin(theta)};
}

double StarDomain::speed(double theta) const { return std::hypot(radius(theta), radius(theta, 1)); }

double StarDomain::min_radius(int samples) const {
  return minimize_periodic([this](double t) { return radius(t); }, samples).value;
}

double StarDomain::max_radius(int samples) const {
  return -minimize_periodic([this](double t) { return -radius(t); }, samples).value;
}

double StarDomain::diameter() const {
  const auto poly = boundary_polyline(*this, 512);
  double d = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    for (std::size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, (poly[i] - poly[j]).norm());
  return d;
}

double StarDomain::perimeter() const {
  // periodic trapezoid rule converges spectrally for smooth integrands
  const int n = 4096 + 64 * modes();
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += speed(kTwoPi * i / n);
  return s * kTwoPi / n;
}

std::vector<double> StarDomain::arclength_angles(int count) const {
  if (count < 3) throw Error(ErrorKind::InvalidArgument, "need at least three boundary samples");
  const int cells = std::max(1024, 8 * count) + 64 * modes();
  const double dt = kTwoPi / cells;
  // 3-point Gauss-Legendre per cell for the cumulative arc length
  static constexpr double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  std::vector<double> cumulative(cells + 1, 0.0);
  for (int c = 0; c < cells; ++c) {
    double s = 0.0;
    for (int q = 0; q < 3; ++q) s += gw[q] * speed((c + 0.5 + 0.5 * gx[q]) * dt);
    cumulative[c + 1] = cumulative[c] + 0.5 * dt * s;
  }
  const double total = cumulative.back();
  std::vector<double> angles(count);
  int cell = 0;
  for (int k = 0; k < count; ++k) {
    const double target = total * k / count;
    while (cell + 1 < cells && cumulative[cell + 1] < target) ++cell;
    const double span = cumulative[cell + 1] - cumulative[cell];
    double t = (cell + (span > 0 ? (target - cumulative[cell]) / span : 0.0)) * dt;
    // Newton on s(t) = target using the cell-local quadrature as s(t_cell)
    for (int it = 0; it < 4; ++it) {
      const double a = cell * dt;
      double s = 0.0;
      for (int q = 0; q < 3; ++q) {
        const double x = a + 0.5 * (t - a) * (1.0 + gx[q]);
        s += gw[q] * speed(x);
      }
      const double arc = cumulative[cell] + 0.5 * (t - a) * s;
      t -= (arc - target) / speed(t);
    }
    angles[k] = t;
  }
  return angles;
}

double polar_curvature(double r, double dr, double ddr) {
  const double q = r * r + dr * dr;
  return (r * r + 2.0 * dr * dr - r * ddr) / (q * std::sqrt(q));
}

BoundaryFrame boundary_frame(const StarDomain& domain, double theta) {
  const double r = domain.radius(theta), dr = domain.radius(theta, 1), ddr = domain.radius(theta, 2);
  const double c = std::cos(theta), s = std::sin(theta);
  BoundaryFrame frame;
  frame.point = {r * c, r * s};
  const Point d{dr * c - r * s, dr * s + r * c};
  frame.tangent = d.normalized();
  frame.normal = {frame.tangent.y(), -frame.tangent.x()};
  frame.curvature = polar_curvature(r, dr, ddr);
  return frame;
}

int winding_number(std::span<const Point> polyline, const Point& z, double tol) {
  const std::size_t n = polyline.size();
  if (n < 3) throw Error(ErrorKind::InvalidArgument, "polyline needs at least three vertices");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = polyline[i];
    const Point& b = polyline[(i + 1) % n];
    if (distance_to_segment(z, a, b) <= tol) throw Error(ErrorKind::PointOnBoundary, "point lies on the curve");
    const Point u = a - z, v = b - z;
    total += std::atan2(u.x() * v.y() - u.y() * v.x(), u.dot(v));
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

int winding_number(const StarDomain& domain, const Point& z) {
  const double rho = z.norm();
  const double r = domain.radius(std::atan2(z.y(), z.x()));
  if (std::abs(rho - r) <= kContainmentBand * r)
    throw Error(ErrorKind::PointOnBoundary, "point lies on the boundary");
  return rho < r ? 1 : 0;
}

bool contains(const StarDomain& domain, const Point& z) {
  const double r = domain.radius(std::atan2(z.y(), z.x()));
  return z.norm() < r * (1.0 - kContainmentBand);
}

double chi_distance(const StarDomain& a, const StarDomain& b, int k) {
  if (k < 0 || k > 4) throw Error(ErrorKind::InvalidArgument, "chi_distance order must be in [0, 4]");
  const int modes = std::max(a.modes(), b.modes());
  const int samples = std::max(256, 32 * modes);
  double result = 0.0;
  for (int j = 0; j <= k; ++j) {
    auto neg_abs = [&](double t) { return -std::abs(a.chi(t, j) - b.chi(t, j)); };
    result = std::max(result, -minimize_periodic(neg_abs, samples).value);
  }
  return result;
}

ConvexityReport is_convex(const StarDomain& domain, double tol) {
  const int samples = std::max(2048, 64 * domain.modes());
  const auto m = minimize_periodic([&](double t) { return boundary_frame(domain, t).curvature; }, samples);
  return {m.value >= -tol, m.value, m.theta};
}

StarDomain scale_domain(const StarDomain& domain, double rho) {
  if (!(rho > 0.0)) throw Error(ErrorKind::InvalidArgument, "scale factor must be positive");
  std::vector<double> a = domain.a(), b = domain.b();
  for (auto& v : a) v *= rho;
  for (auto& v : b) v *= rho;
  return StarDomain(rho * (1.0 + domain.a0()) - 1.0, std::move(a), std::move(b));
}

double ChiProfile::operator()(double theta) const {
  double v = a0;
  for (std::size_t m = 0; m < a.size(); ++m) v += a[m] * std::cos((m + 1.0) * theta);
  for (std::size_t m = 0; m < b.size(); ++m) v += b[m] * std::sin((m + 1.0) * theta);
  return v;
}

StarDomain perturb_domain(const StarDomain& base, const ChiProfile& profile, double amplitude) {
  const auto m = std::max<std::size_t>({static_cast<std::size_t>(base.modes()), profile.a.size(), profile.b.size()});
  std::vector<double> a(m, 0.0), b(m, 0.0);
  for (int i = 0; i < base.modes(); ++i) {
    a[i] += base.a()[i];
    b[i] += base.b()[i];
  }
  for (std::size_t i = 0; i < profile.a.size(); ++i) a[i] += amplitude * profile.a[i];
  for (std::size_t i = 0; i < profile.b.size(); ++i) b[i] += amplitude * profile.b[i];
  return StarDomain(base.a0() + amplitude * profile.a0, std::move(a), std::move(b));
}

std::vector<Point> boundary_polyline(const StarDomain& domain, int count) {
  std::vector<Point> poly(count);
  for (int i = 0; i < count; ++i) poly[i] = domain.boundary_point(kTwoPi * i / count);
  return poly;
}

void to_json(nlohmann::json& j, const StarDomain& d) {
  j = nlohmann::json{{"a0", d.a0()}, {"a", d.a()}, {"b", d.b()}};
}

void from_json(const nlohmann::json& j, StarDomain& d) {
  d = StarDomain(j.value("a0", 0.0), j.value("a", std::vector<double>{}), j.value("b", std::vector<double>{}));
}

void to_json(nlohmann::json& j, const ChiProfile& p) { j = nlohmann::json{{"a0", p.a0}, {"a", p.a}, {"b", p.b}}; }

void from_json(const nlohmann::json& j, ChiProfile& p) {
  p.a0 = j.value("a0", 0.0);
  p.a = j.value("a", std::vector<double>{});
  p.b = j.value("b", std::vector<double>{});
}

StarDomain load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open domain file " + path);
  try {
    return nlohmann::json::parse(in).get<StarDomain>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, "domain file " + path + ": " + e.what());
  }
}

}  // namespace critshape
