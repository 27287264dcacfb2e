#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "critshape/conformal.hpp"
#include "critshape/solver.hpp"

namespace critshape {

enum class MorseType { Max, Min, Saddle, Degenerate };

struct CriticalPoint {
  Point location = Point::Zero();
  double gradient_norm = 0.0;
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
  double determinant = 0.0;
  MorseType type = MorseType::Degenerate;
  bool nondegenerate = false;
};

struct MorseConfig {
  double hessian_tol = 1e-6;       // degenerate if |det H| <= tol ||H||^2
  double dedup_radius = 2.0;       // in units of the mesh size
  double boundary_exclusion = 2.0;  // in units of the mesh size
  // Fit radius R = fit_radius * sqrt(h * diameter / 20). The non-smooth part
  // of the P1 nodal error is O(h^2) and enters the Hessian as O(h^2 / R^2);
  // with R proportional to h it would never shrink.
  double fit_radius = 3.0;
  double gradient_tol = 1e-8;      // relative to max|u| / diameter
  int max_iterations = 50;
};

// Smooth local surrogate of a P1 solution: weighted least-squares quartic
// fitted to the nodal values within R of p (weights (1 - (d/R)^2)^2). It
// varies smoothly with p, so Newton on its gradient converges.
struct LocalModel {
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
  int support = 0;
};

class LocalFitter {
 public:
  LocalFitter(const SolutionField& sol, double radius);
  std::optional<LocalModel> fit(const Point& p) const;
  double radius() const { return radius_; }

 private:
  const SolutionField* sol_;
  double radius_;
  Point lo_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

// All critical points of the recovered smooth surrogate, sorted by location.
std::vector<CriticalPoint> find_critical_points(const SolutionField& sol, const MorseConfig& config = {});

MorseType classify(const Eigen::Matrix2d& hessian, double tol, bool* nondegenerate = nullptr);
std::string to_string(MorseType t);

struct MorseCounts {
  int maxima = 0, minima = 0, saddles = 0, degenerate = 0;
};
MorseCounts count_types(const std::vector<CriticalPoint>& points);

struct PushforwardPair {
  Point u_point;       // critical point of u
  Complex v_point;     // matched critical point of v
  Point pulled_back;   // inverse map applied to v_point
  double location_error = 0.0;
  double det_u = 0.0, det_v = 0.0, inverse_modulus = 0.0;
  double det_residual = 0.0;  // |det D2v - det D2u |tau'|^4|
};

struct PushforwardReport {
  double value_sup = 0.0;  // sup |v(T(z)) - u(z)| over interior vertices of u
  int value_samples = 0;
  std::vector<PushforwardPair> pairs;
  double max_det_residual = 0.0;
  double max_location_error = 0.0;
};

// u solves -Laplace u = f on the map's domain, v the torsion problem on its
// image. Throws CriticalPointMismatch if the critical point counts differ.
PushforwardReport pushforward_residuals(const ConformalMap& map, const SolutionField& u, const SolutionField& v,
                                        const MorseConfig& config = {});

struct NonlinearSpec {
  std::string g = "exp(u)";
  double lambda = 1.0;
  int steps = 10;
};

struct FamilyEntry {
  double epsilon = 0.0;
  bool ok = false;
  std::string error;
  std::vector<CriticalPoint> points;
  double mu1 = 0.0;
  Stability stability = Stability::Stable;
  double max_value = 0.0;
  double distance_to_limit = 0.0;  // |P_eps - P_c|
  double norm_of_location = 0.0;   // |P_eps|
  SolutionDifference difference;   // against the limit solution
  bool remeshed = false;
};

struct FamilyReport {
  StarDomain base;
  double h = 0.0;
  std::vector<CriticalPoint> limit_points;  // P_c candidates
  double limit_mu1 = 0.0;
  double limit_max_value = 0.0;
  std::vector<FamilyEntry> entries;  // in processing order (largest epsilon first)
};

// Solves the nonlinear problem on base + eps * profile for every eps, with
// meshes obtained by mapping one base mesh radially (so neighbouring members
// share connectivity and warm starts). Per-member failures are recorded, not
// thrown. Throws InvalidArgument if the base domain is not convex.
FamilyReport track_family(const StarDomain& base, const ChiProfile& profile, std::vector<double> epsilons,
                          const NonlinearSpec& problem, double h, const SolverConfig& solver = {},
                          const MorseConfig& morse = {});

void to_json(nlohmann::json& j, const CriticalPoint& c);
void to_json(nlohmann::json& j, const PushforwardReport& r);
void to_json(nlohmann::json& j, const FamilyReport& r);

}  // namespace critshape
