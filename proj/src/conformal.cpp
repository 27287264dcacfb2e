#include "critshape/conformal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include <nlohmann/json.hpp>

#include "critshape/error.hpp"

namespace critshape {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 8-point Gauss-Legendre on [-1, 1]
constexpr std::array<double, 8> kGx = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                       -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                       0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGw = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                       0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                       0.2223810344533745, 0.1012285362903763};

constexpr double kQuadTol = 1e-14;
constexpr int kMaxDepth = 30;

bool in_closure(const StarDomain& d, const Point& z) {
  return z.norm() <= d.radius(std::atan2(z.y(), z.x())) * (1.0 + 1e-12);
}

}  // namespace

ConformalMap::ConformalMap(StarDomain domain, ScalarField f, double hp2_tol)
    : domain_(std::move(domain)), f_(std::move(f)) {
  const auto report = check_hypotheses(domain_, f_, 256, 256, hp2_tol);
  if (!report.positivity.pass)
    throw Error(ErrorKind::NonpositiveField, "f must be positive on the closed domain (min " +
                                                 std::to_string(report.positivity.min_value) + ")");
  if (!report.hp2.pass)
    throw Error(ErrorKind::Hp2Violated, "log f is not harmonic: relative defect " +
                                            std::to_string(report.hp2.max_defect));
  boundary_jets_.reserve(kBoundaryImageSamples);
  boundary_image_.reserve(kBoundaryImageSamples);
  for (int k = 0; k < kBoundaryImageSamples; ++k) {
    const auto jet_k = jet(domain_.boundary_point(kTwoPi * k / kBoundaryImageSamples));
    boundary_jets_.push_back(jet_k);
    boundary_image_.push_back(jet_k.value);
  }
}

ConformalMap build_map(const StarDomain& domain, const ScalarField& f, double hp2_tol) {
  return ConformalMap(domain, f, hp2_tol);
}

ConformalMap::State ConformalMap::integrate_panel(const Point& z0, const Point& d, double ta, double tb,
                                                  double v0) const {
  // V along the path: dV = -U_y dx + U_x dy with U = (1/2) log f.
  auto rate = [&](double t) {
    const Point p = z0 + t * d;
    const Eigen::Vector2d g = f_.gradient(p) / (2.0 * f_(p));
    return -g.y() * d.x() + g.x() * d.y();
  };
  const double half = 0.5 * (tb - ta), mid = 0.5 * (tb + ta);
  const Complex dc = to_complex(d);
  Complex dT = 0.0;
  double dv = 0.0;
  for (std::size_t k = 0; k < kGx.size(); ++k) {
    const double tk = mid + half * kGx[k];
    // V at the node by a nested rule on [ta, tk]
    const double sub_half = 0.5 * (tk - ta), sub_mid = 0.5 * (tk + ta);
    double vk = 0.0;
    for (std::size_t q = 0; q < kGx.size(); ++q) vk += kGw[q] * rate(sub_mid + sub_half * kGx[q]);
    vk = v0 + sub_half * vk;
    const Point p = z0 + tk * d;
    dT += kGw[k] * std::exp(Complex(0.5 * std::log(f_(p)), vk));
    dv += kGw[k] * rate(tk);
  }
  return {half * dT * dc, v0 + half * dv};
}

ConformalMap::State ConformalMap::integrate_adaptive(const Point& z0, const Point& d, double ta, double tb,
                                                     State start, const State& whole, int depth) const {
  const double tm = 0.5 * (ta + tb);
  const State left = integrate_panel(z0, d, ta, tm, start.conjugate);
  const State right = integrate_panel(z0, d, tm, tb, left.conjugate);
  const double err = std::abs(left.value + right.value - whole.value) + std::abs(right.conjugate - whole.conjugate);
  const double scale = 1.0 + std::abs(whole.value) + std::abs(whole.conjugate - start.conjugate);
  if (err <= kQuadTol * scale || depth >= kMaxDepth) {
    return {start.value + left.value + right.value, right.conjugate};
  }
  const State mid_state = integrate_adaptive(z0, d, ta, tm, start, left, depth + 1);
  return integrate_adaptive(z0, d, tm, tb, mid_state, right, depth + 1);
}

ConformalMap::State ConformalMap::integrate_segment(const Point& z0, const Point& z1, State start) const {
  const Point d = z1 - z0;
  if (d.norm() == 0.0) return start;
  const State whole = integrate_panel(z0, d, 0.0, 1.0, start.conjugate);
  return integrate_adaptive(z0, d, 0.0, 1.0, start, whole, 0);
}

MapJet ConformalMap::finish(const Point& z, const State& s) const {
  MapJet j;
  j.value = s.value;
  j.conjugate = s.conjugate;
  j.derivative = std::exp(Complex(0.5 * std::log(f_(z)), s.conjugate));
  j.second = j.derivative * log_derivative(z);
  return j;
}

MapJet ConformalMap::jet(const Point& z) const {
  return finish(z, integrate_segment(Point::Zero(), z, {0.0, 0.0}));
}

MapJet ConformalMap::jet_along(const Point& via, const Point& z) const {
  const State mid = integrate_segment(Point::Zero(), via, {0.0, 0.0});
  return finish(z, integrate_segment(via, z, mid));
}

Complex ConformalMap::log_derivative(const Point& z) const {
  const Eigen::Vector2d g = f_.gradient(z) / (2.0 * f_(z));
  return {g.x(), -g.y()};
}

std::vector<Point> ConformalMap::boundary_image_polyline() const {
  std::vector<Point> poly;
  poly.reserve(boundary_image_.size());
  for (const auto& c : boundary_image_) poly.push_back(to_point(c));
  return poly;
}

ImageCurvature image_curvature(const ConformalMap& map, double theta) {
  const auto frame = boundary_frame(map.domain(), theta);
  const ScalarField& f = map.field();
  const double fz = f(frame.point);
  // |T'| = exp(Re w) = sqrt(f) exactly; no path integral needed
  const double modulus = std::sqrt(fz);
  const Complex t = to_complex(frame.tangent);
  ImageCurvature out;
  out.curvature = (std::imag(t * map.log_derivative(frame.point)) + frame.curvature) / modulus;
  out.curvature_alt = (normal_derivative(f, frame) + 2.0 * frame.curvature * fz) / (2.0 * fz * modulus);
  return out;
}

double tangential_identity_residual(const ConformalMap& map, double theta) {
  const auto frame = boundary_frame(map.domain(), theta);
  const Complex t = to_complex(frame.tangent);
  const double lhs = std::imag(t * map.log_derivative(frame.point));
  const double rhs = normal_derivative(map.field(), frame) / (2.0 * map.field()(frame.point));
  return std::abs(lhs - rhs);
}

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_cross(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = cross(p2 - p1, q1 - p1), d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1), d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace

InjectivityReport check_injectivity(const ConformalMap& map, int n) {
  if (n < 16) throw Error(ErrorKind::InvalidArgument, "need at least 16 boundary samples");
  InjectivityReport report;
  report.samples = n;
  std::vector<Point> poly(n);
  for (int k = 0; k < n; ++k) poly[k] = to_point(map(map.domain().boundary_point(kTwoPi * k / n)));

  std::vector<Eigen::AlignedBox2d> boxes(n);
  for (int i = 0; i < n; ++i) {
    boxes[i].extend(poly[i]);
    boxes[i].extend(poly[(i + 1) % n]);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      if (!boxes[i].intersects(boxes[j])) continue;
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) ++report.self_intersections;
    }
  }

  const auto probes = halton_interior_points(map.domain(), 24);
  report.min_winding = std::numeric_limits<int>::max();
  report.max_winding = std::numeric_limits<int>::min();
  for (const Point& p : probes) {
    int w = 0;
    try {
      w = winding_number(poly, to_point(map(p)), 1e-12);
    } catch (const Error&) {
      w = 0;  // image of an interior point on the image boundary: not injective
    }
    report.min_winding = std::min(report.min_winding, w);
    report.max_winding = std::max(report.max_winding, w);
  }
  report.injective = report.self_intersections == 0 && report.min_winding == 1 && report.max_winding == 1;
  return report;
}

namespace {

// Damped Newton from one start; returns true on convergence.
bool newton_inverse(const ConformalMap& map, const Complex& zeta, Point& z) {
  const double tol = kInverseTol * (1.0 + std::abs(zeta));
  MapJet j = map.jet(z);
  double res = std::abs(j.value - zeta);
  for (int it = 0; it < 60; ++it) {
    if (res <= tol) return true;
    const Complex step = (j.value - zeta) / j.derivative;
    double damping = 1.0;
    bool improved = false;
    for (int half = 0; half < 30; ++half, damping *= 0.5) {
      const Point trial = z - damping * to_point(step);
      if (!in_closure(map.domain(), trial)) continue;
      const MapJet jt = map.jet(trial);
      const double rt = std::abs(jt.value - zeta);
      if (rt < res || rt <= tol) {
        z = trial;
        j = jt;
        res = rt;
        improved = true;
        break;
      }
    }
    if (!improved) return res <= tol;
  }
  return res <= tol;
}

}  // namespace

Point inverse(const ConformalMap& map, const Complex& zeta, const Point& guess) {
  int w = 0;
  try {
    w = winding_number(map.boundary_image_polyline(), to_point(zeta), 0.0);
  } catch (const Error&) {
    w = 1;  // on the sampled image boundary: let Newton decide
  }
  if (w == 0) throw Error(ErrorKind::OutsideImage, "point is outside the image T(Omega)");

  Point z = in_closure(map.domain(), guess) ? guess : Point::Zero();
  if (newton_inverse(map, zeta, z)) return z;

  // multi-start over interior points, closest images first
  auto starts = halton_interior_points(map.domain(), 64);
  std::vector<std::pair<double, Point>> ranked;
  ranked.reserve(starts.size());
  for (const auto& s : starts) ranked.emplace_back(std::abs(map(s) - zeta), s);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < std::min<std::size_t>(ranked.size(), 16); ++i) {
    z = ranked[i].second;
    if (newton_inverse(map, zeta, z)) return z;
  }
  throw Error(ErrorKind::NewtonDiverged, "Newton inversion failed from all starts");
}

Point inverse(const ConformalMap& map, const Complex& zeta) { return inverse(map, zeta, Point::Zero()); }

double modulus_residual(const ConformalMap& map, const Point& z) {
  const double fz = map.field()(z);
  return std::abs(std::norm(map.derivative(z)) - fz) / fz;
}

double path_independence_residual(const ConformalMap& map, const Point& z) {
  const MapJet direct = map.jet(z);
  // bend the path sideways, shrinking the offset until the detour stays inside
  Point normal(-z.y(), z.x());
  for (double offset = 0.25; offset > 1e-3; offset *= 0.5) {
    const Point via = 0.5 * z + offset * normal;
    bool inside = true;
    for (int k = 1; k < 16 && inside; ++k) {
      const double s = k / 16.0;
      inside = contains(map.domain(), s * via) && contains(map.domain(), via + s * (z - via));
    }
    if (!inside) continue;
    const MapJet bent = map.jet_along(via, z);
    return std::abs(bent.value - direct.value) + std::abs(bent.conjugate - direct.conjugate);
  }
  return 0.0;
}

double cauchy_riemann_residual(const ConformalMap& map, const Point& z, double step) {
  const Complex tx = (map(z + Point(step, 0)) - map(z - Point(step, 0))) / (2 * step);
  const Complex ty = (map(z + Point(0, step)) - map(z - Point(0, step))) / (2 * step);
  // h_x = g_y and h_y = -g_x
  return std::max(std::abs(tx.real() - ty.imag()), std::abs(ty.real() + tx.imag()));
}

namespace {

// Angle parameter of the source boundary where arg T(gamma(t)) = phi, given
// a bracketing interval with unwrapped arguments (arg_lo, arg_hi).
double solve_direction(const ConformalMap& map, double phi, double t_lo, double t_hi, double arg_lo, double arg_hi) {
  auto arg_at = [&](double t, double reference) {
    const Complex z = map(map.domain().boundary_point(t));
    double a = std::arg(z);
    while (a - reference > std::numbers::pi) a -= kTwoPi;
    while (a - reference < -std::numbers::pi) a += kTwoPi;
    return a;
  };
  // Illinois regula falsi
  double flo = arg_lo - phi, fhi = arg_hi - phi;
  int side = 0;
  double t = t_lo;
  for (int it = 0; it < 60; ++it) {
    t = (t_lo * fhi - t_hi * flo) / (fhi - flo);
    const double ft = arg_at(t, phi) - phi;
    if (std::abs(ft) < 1e-15 || t_hi - t_lo < 1e-15) break;
    if ((ft > 0) == (fhi > 0)) {
      t_hi = t;
      fhi = ft;
      if (side == 1) flo *= 0.5;
      side = 1;
    } else {
      t_lo = t;
      flo = ft;
      if (side == -1) fhi *= 0.5;
      side = -1;
    }
  }
  return t;
}

}  // namespace

StarDomain image_star_domain(const ConformalMap& map, int modes, double* fit_error) {
  const auto& image = map.boundary_image();
  const int n = static_cast<int>(image.size());
  std::vector<double> unwrapped(n + 1);
  unwrapped[0] = std::arg(image[0]);
  for (int k = 1; k <= n; ++k) {
    double a = std::arg(image[k % n]);
    while (a - unwrapped[k - 1] > std::numbers::pi) a -= kTwoPi;
    while (a - unwrapped[k - 1] < -std::numbers::pi) a += kTwoPi;
    if (a <= unwrapped[k - 1]) throw Error(ErrorKind::InvalidArgument, "image is not star-shaped about T(0)");
    unwrapped[k] = a;
  }
  if (std::abs(unwrapped[n] - unwrapped[0] - kTwoPi) > 1e-9)
    throw Error(ErrorKind::InvalidArgument, "image boundary does not wind once about T(0)");

  auto radius_at = [&](double phi) {
    // bring phi into [unwrapped[0], unwrapped[0] + 2 pi)
    double p = phi;
    while (p < unwrapped[0]) p += kTwoPi;
    while (p >= unwrapped[0] + kTwoPi) p -= kTwoPi;
    const int k = static_cast<int>(std::upper_bound(unwrapped.begin(), unwrapped.end(), p) - unwrapped.begin()) - 1;
    const double t = solve_direction(map, p, kTwoPi * k / n, kTwoPi * (k + 1) / n, unwrapped[k], unwrapped[k + 1]);
    return std::abs(map(map.domain().boundary_point(t)));
  };

  const int samples = std::max(256, 4 * modes);
  std::vector<double> radii(samples);
  for (int j = 0; j < samples; ++j) radii[j] = radius_at(kTwoPi * j / samples);
  double mean = 0.0;
  for (double r : radii) mean += r;
  mean /= samples;
  std::vector<double> a(modes, 0.0), b(modes, 0.0);
  for (int m = 1; m <= modes; ++m) {
    for (int j = 0; j < samples; ++j) {
      const double phi = kTwoPi * j / samples;
      a[m - 1] += radii[j] * std::cos(m * phi);
      b[m - 1] += radii[j] * std::sin(m * phi);
    }
    a[m - 1] *= 2.0 / samples;
    b[m - 1] *= 2.0 / samples;
  }
  StarDomain fitted(mean - 1.0, std::move(a), std::move(b));
  if (fit_error) {
    double worst = 0.0;
    for (int j = 0; j < 32; ++j) {
      const double phi = kTwoPi * (j + 0.37) / 32;
      worst = std::max(worst, std::abs(fitted.radius(phi) - radius_at(phi)));
    }
    *fit_error = worst;
  }
  return fitted;
}

void to_json(nlohmann::json& j, const InjectivityReport& r) {
  j = {{"injective", r.injective},
       {"samples", r.samples},
       {"self_intersections", r.self_intersections},
       {"min_winding", r.min_winding},
       {"max_winding", r.max_winding}};
}

}  // namespace critshape
