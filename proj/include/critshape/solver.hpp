#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "critshape/field.hpp"
#include "critshape/mesh.hpp"

namespace critshape {

struct SolverConfig {
  double cg_tol = 1e-12;
  int cg_max_iterations = 20000;
  double residual_tol = 1e-10;  // relative residual accepted from any solve
  double newton_tol = 1e-10;
  int newton_max_iterations = 40;
  int max_step_halvings = 24;
  double eigen_tol = 1e-8;
  int eigen_max_iterations = 2000;
  double stability_tol = 1e-6;
  double lambda_resolution = 1e-3;
  double lambda_budget = 1e4;  // largest parameter tried by lambda_star_estimate
  int lambda_max_solves = 400;
};

enum class ProblemKind { Poisson, Nonlinear, Given };

// P1 solution with recovered derivatives. Immutable once returned; the mesh
// is shared between solutions computed on it.
struct SolutionField {
  std::shared_ptr<const Mesh> mesh;
  std::vector<double> values;
  std::vector<Eigen::Vector2d> gradients;  // area-weighted element gradients
  std::vector<Eigen::Matrix2d> hessians;   // quadratic fit on second-ring patches

  ProblemKind kind = ProblemKind::Given;
  std::string forcing;  // f for Poisson, g for the nonlinear problem
  double lambda = 0.0;
  double residual = 0.0;  // relative algebraic residual of the final solve
  int iterations = 0;     // CG iterations, or total Newton iterations

  double max_value() const;
  int argmax() const;
};

// Wraps given nodal values (zero on the boundary is not enforced) and runs
// the derivative recovery.
SolutionField make_solution(std::shared_ptr<const Mesh> mesh, std::vector<double> values);

std::vector<Eigen::Vector2d> recover_gradients(const Mesh& mesh, const std::vector<double>& values);
std::vector<Eigen::Matrix2d> recover_hessians(const Mesh& mesh, const std::vector<double>& values);

// -Laplace u = f, u = 0 on the boundary. Throws SolverStagnation.
SolutionField solve_poisson(std::shared_ptr<const Mesh> mesh, const ScalarField& f, const SolverConfig& config = {});

// -Laplace u = lambda g(u), u = 0 on the boundary, by continuation from u = 0
// in `steps` equal increments with damped Newton at each step; a failed step
// is retried with halved increments. Only solutions whose Jacobian is
// positive definite are accepted, so the result is the minimal (stable)
// solution. Throws ContinuationError carrying the last parameter reached.
SolutionField solve_nonlinear(std::shared_ptr<const Mesh> mesh, const ScalarField& g, double lambda, int steps,
                              const SolverConfig& config = {}, const std::vector<double>* warm_start = nullptr);

enum class Stability { Stable, SemiStable, Unstable };

struct StabilityInfo {
  double mu1 = 0.0;
  std::vector<double> eigenfunction;  // nodal, zero on the boundary, max 1
  Stability classification = Stability::Stable;
  double residual = 0.0;
  int iterations = 0;
};

// Smallest eigenvalue of -Laplace - lambda g'(u) with zero boundary data.
// Throws EigenSolveFailure.
StabilityInfo stability_eigenvalue(const SolutionField& sol, const ScalarField& gprime, double lambda,
                                   const SolverConfig& config = {});

struct LambdaStarEstimate {
  double lambda_star = 0.0;  // midpoint of the final bracket
  double lower = 0.0;        // largest parameter with a stable solution
  double upper = 0.0;        // smallest parameter known to fail (infinity if none)
  bool budget_exhausted = false;
  int solves = 0;
};

LambdaStarEstimate lambda_star_estimate(std::shared_ptr<const Mesh> mesh, const ScalarField& g,
                                        const SolverConfig& config = {});

struct SolutionDifference {
  double sup[3] = {0.0, 0.0, 0.0};  // orders 0, 1, 2
  int samples = 0;
};

// Sup over a's vertices that lie in b's mesh (and at least `margin` away from
// both boundaries) of |D^k (a - b)|, b interpolated. Throws EmptyIntersection.
SolutionDifference compare_solutions(const SolutionField& a, const SolutionField& b, double margin = 0.0);

// Linear interpolation of the nodal values, gradients and Hessians.
struct PointSample {
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};
std::optional<PointSample> sample_solution(const SolutionField& sol, const MeshLocator& locator, const Point& p,
                                           double reach = 0.0);

std::string to_string(Stability s);

void to_json(nlohmann::json& j, const SolutionField& sol);
SolutionField solution_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const StabilityInfo& s);
void to_json(nlohmann::json& j, const LambdaStarEstimate& e);

}  // namespace critshape
