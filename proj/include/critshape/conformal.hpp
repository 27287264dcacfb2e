#pragma once

#include <complex>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "critshape/field.hpp"
#include "critshape/geometry.hpp"
#include "critshape/hypotheses.hpp"

namespace critshape {

using Complex = std::complex<double>;

inline Complex to_complex(const Point& p) { return {p.x(), p.y()}; }
inline Point to_point(const Complex& z) { return {z.real(), z.imag()}; }

// Values of the map at a point, all obtained from one path integral from 0.
struct MapJet {
  Complex value;       // T(z)
  Complex derivative;  // T'(z) = exp(w(z))
  Complex second;      // T''(z) = T'(z) w'(z)
  double conjugate = 0.0;  // harmonic conjugate of (1/2) log f, zero at the origin
};

struct ImageCurvature {
  double curvature = 0.0;      // (Im(t T''/T') + K) / |T'|
  double curvature_alt = 0.0;  // (f_nu + 2 K f) / (2 f |T'|)
};

struct InjectivityReport {
  bool injective = false;
  int samples = 0;
  int self_intersections = 0;
  int min_winding = 0;
  int max_winding = 0;
};

// The holomorphic map T with |T'|^2 = f and T(0) = 0, for f > 0 with
// log f harmonic. The phase is fixed by requiring T'(0) > 0.
//
// With U = (1/2) log f and V its harmonic conjugate (V(0) = 0), w = U + iV is
// holomorphic and T' = exp(w). V and T are integrated along straight
// segments, which stay inside a star-shaped domain.
class ConformalMap {
 public:
  ConformalMap(StarDomain domain, ScalarField f, double hp2_tol = kHp2Tol);

  const StarDomain& domain() const { return domain_; }
  const ScalarField& field() const { return f_; }

  MapJet jet(const Point& z) const;
  Complex operator()(const Point& z) const { return jet(z).value; }
  Complex derivative(const Point& z) const { return jet(z).derivative; }

  // Jet obtained along the polyline 0 -> via -> z instead of the segment.
  MapJet jet_along(const Point& via, const Point& z) const;

  // w'(z) = U_x - i U_y, needs no path integral.
  Complex log_derivative(const Point& z) const;

  // Cached image of the boundary at equally spaced angles (counterclockwise).
  const std::vector<Complex>& boundary_image() const { return boundary_image_; }
  std::vector<Point> boundary_image_polyline() const;

  // Jets at the cached boundary angles 2 pi k / n.
  const std::vector<MapJet>& boundary_jets() const { return boundary_jets_; }

 private:
  struct State {
    Complex value;
    double conjugate;
  };
  State integrate_segment(const Point& z0, const Point& z1, State start) const;
  State integrate_panel(const Point& z0, const Point& d, double ta, double tb, double v0) const;
  State integrate_adaptive(const Point& z0, const Point& d, double ta, double tb, State start, const State& whole,
                           int depth) const;
  MapJet finish(const Point& z, const State& s) const;

  StarDomain domain_;
  ScalarField f_;
  std::vector<Complex> boundary_image_;
  std::vector<MapJet> boundary_jets_;
};

inline constexpr int kBoundaryImageSamples = 1024;

ConformalMap build_map(const StarDomain& domain, const ScalarField& f, double hp2_tol = kHp2Tol);

ImageCurvature image_curvature(const ConformalMap& map, double theta);

// |Im(t T''/T') - nu . grad f / (2 f)| at the boundary point.
double tangential_identity_residual(const ConformalMap& map, double theta);

InjectivityReport check_injectivity(const ConformalMap& map, int n);

// Newton inversion of T. Throws OutsideImage or NewtonDiverged.
Point inverse(const ConformalMap& map, const Complex& zeta, const Point& guess);
Point inverse(const ConformalMap& map, const Complex& zeta);

inline constexpr double kInverseTol = 1e-12;

// ||T'(z)|^2 - f(z)| / f(z)
double modulus_residual(const ConformalMap& map, const Point& z);

// |T along 0 -> z| versus |T along a bent path|, a holomorphy certificate.
double path_independence_residual(const ConformalMap& map, const Point& z);

// max(|h_x - g_y|, |h_y + g_x|) for T = h + i g by central differences.
double cauchy_riemann_residual(const ConformalMap& map, const Point& z, double step = 1e-5);

// Star-shaped description of T(Omega) about T(0) = 0, fitted with `modes`
// Fourier modes. Requires the image to be star-shaped about the origin
// (true whenever it is convex). `fit_error` receives the max radial misfit
// at off-grid directions.
StarDomain image_star_domain(const ConformalMap& map, int modes, double* fit_error = nullptr);

void to_json(nlohmann::json& j, const InjectivityReport& r);

}  // namespace critshape
