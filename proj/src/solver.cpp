#include "critshape/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <nlohmann/json.hpp>

#include "critshape/error.hpp"

namespace critshape {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Interior vertices are the unknowns; boundary values are zero.
struct Dofs {
  std::vector<int> of_vertex;  // -1 on the boundary
  std::vector<int> vertex;
  int count() const { return static_cast<int>(vertex.size()); }
};

Dofs number_dofs(const Mesh& mesh) {
  Dofs d;
  d.of_vertex.assign(mesh.num_vertices(), -1);
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (mesh.boundary[i]) continue;
    d.of_vertex[i] = d.count();
    d.vertex.push_back(i);
  }
  return d;
}

// Gradients of the three barycentric basis functions, scaled by 2|T|.
std::array<Eigen::Vector2d, 3> scaled_basis_gradients(const Mesh& mesh, const Triangle& t) {
  std::array<Eigen::Vector2d, 3> g;
  for (int k = 0; k < 3; ++k) {
    const Point& a = mesh.vertices[t[(k + 1) % 3]];
    const Point& b = mesh.vertices[t[(k + 2) % 3]];
    g[k] = Eigen::Vector2d(a.y() - b.y(), b.x() - a.x());
  }
  return g;
}

SpMat assemble_stiffness(const Mesh& mesh, const Dofs& dofs) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    const double area = mesh.area(t);
    const auto g = scaled_basis_gradients(mesh, tri);
    for (int i = 0; i < 3; ++i) {
      const int di = dofs.of_vertex[tri[i]];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = dofs.of_vertex[tri[j]];
        if (dj < 0) continue;
        trip.emplace_back(di, dj, g[i].dot(g[j]) / (4.0 * area));
      }
    }
  }
  SpMat a(dofs.count(), dofs.count());
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

// Edge-midpoint rule (exact for quadratics): the mass-type matrix of a
// weight w sampled at the three midpoints. With w = 1 it is the consistent
// mass matrix.
template <class Weight>
SpMat assemble_weighted_mass(const Mesh& mesh, const Dofs& dofs, Weight&& w) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    const double c = mesh.area(t) / 12.0;
    double wm[3];  // wm[k] on the edge opposite vertex k
    for (int k = 0; k < 3; ++k) wm[k] = w(tri[(k + 1) % 3], tri[(k + 2) % 3]);
    for (int i = 0; i < 3; ++i) {
      const int di = dofs.of_vertex[tri[i]];
      if (di < 0) continue;
      trip.emplace_back(di, di, c * (wm[(i + 1) % 3] + wm[(i + 2) % 3]));
      for (int j = 0; j < 3; ++j) {
        if (j == i) continue;
        const int dj = dofs.of_vertex[tri[j]];
        if (dj < 0) continue;
        trip.emplace_back(di, dj, c * wm[3 - i - j]);
      }
    }
  }
  SpMat m(dofs.count(), dofs.count());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

// Load vector int s * phi_i with s sampled at edge midpoints.
template <class Source>
Vec assemble_load(const Mesh& mesh, const Dofs& dofs, Source&& s) {
  Vec b = Vec::Zero(dofs.count());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    const double c = mesh.area(t) / 6.0;
    double sm[3];
    for (int k = 0; k < 3; ++k) sm[k] = s(tri[(k + 1) % 3], tri[(k + 2) % 3]);
    for (int i = 0; i < 3; ++i) {
      const int di = dofs.of_vertex[tri[i]];
      if (di >= 0) b[di] += c * (sm[(i + 1) % 3] + sm[(i + 2) % 3]);
    }
  }
  return b;
}

std::vector<double> to_nodal(const Mesh& mesh, const Dofs& dofs, const Vec& x) {
  std::vector<double> u(mesh.num_vertices(), 0.0);
  for (int k = 0; k < dofs.count(); ++k) u[dofs.vertex[k]] = x[k];
  return u;
}

Vec from_nodal(const Dofs& dofs, const std::vector<double>& u) {
  Vec x(dofs.count());
  for (int k = 0; k < dofs.count(); ++k) x[k] = u[dofs.vertex[k]];
  return x;
}

// Discrete problem A u = lambda b(u) on a fixed mesh.
class NonlinearProblem {
 public:
  NonlinearProblem(const Mesh& mesh, const ScalarField& g)
      : mesh_(mesh), g_(g), dofs_(number_dofs(mesh)), a_(assemble_stiffness(mesh, dofs_)) {}

  const Dofs& dofs() const { return dofs_; }
  const SpMat& stiffness() const { return a_; }

  Vec load(const Vec& x) const {
    const auto u = to_nodal(mesh_, dofs_, x);
    return assemble_load(mesh_, dofs_, [&](int i, int j) { return g_(0.5 * (u[i] + u[j])); });
  }

  SpMat jacobian(const Vec& x, double lambda) const {
    const auto u = to_nodal(mesh_, dofs_, x);
    const SpMat gm = assemble_weighted_mass(mesh_, dofs_, [&](int i, int j) { return g_.derivative(0.5 * (u[i] + u[j])); });
    return a_ - lambda * gm;
  }

  Vec residual(const Vec& x, double lambda, double* scale) const {
    const Vec lb = lambda * load(x);
    const Vec au = a_ * x;
    if (scale) *scale = std::max(lb.norm(), au.norm());
    return au - lb;
  }

  struct NewtonResult {
    bool converged = false;
    bool stable = false;
    int iterations = 0;
    double residual = 0.0;
  };

  // Damped Newton from x (updated in place). `stable` reports whether the
  // Jacobian at the converged point is positive definite.
  NewtonResult newton(Vec& x, double lambda, const SolverConfig& config) const {
    NewtonResult r;
    double scale = 0.0;
    Vec f = residual(x, lambda, &scale);
    double fn = f.norm();
    Eigen::SimplicialLDLT<SpMat> ldlt;
    for (;;) {
      if (!std::isfinite(fn)) return r;
      const SpMat j = jacobian(x, lambda);
      ldlt.compute(j);
      if (ldlt.info() != Eigen::Success) return r;
      if (fn <= config.newton_tol * scale) {
        r.converged = true;
        r.stable = ldlt.vectorD().minCoeff() > 0.0;
        r.residual = scale > 0 ? fn / scale : 0.0;
        return r;
      }
      if (r.iterations >= config.newton_max_iterations) return r;
      ++r.iterations;
      const Vec dx = ldlt.solve(f);
      double t = 1.0;
      for (;;) {
        const Vec trial = x - t * dx;
        double trial_scale = 0.0;
        Vec trial_f;
        bool ok = true;
        try {
          trial_f = residual(trial, lambda, &trial_scale);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::DomainError) throw;
          ok = false;
        }
        const double tn = ok ? trial_f.norm() : std::numeric_limits<double>::infinity();
        if (std::isfinite(tn) && tn <= (1.0 - 1e-4 * t) * fn) {
          x = trial;
          f = std::move(trial_f);
          fn = tn;
          scale = trial_scale;
          break;
        }
        t *= 0.5;
        if (t < 1.0 / 1024) return r;
      }
    }
  }

  // du/dlambda = J^{-1} b(u) along the solution branch.
  Vec tangent(const Vec& x, double lambda) const {
    Eigen::SimplicialLDLT<SpMat> ldlt(jacobian(x, lambda));
    if (ldlt.info() != Eigen::Success) return Vec::Zero(x.size());
    return ldlt.solve(load(x));
  }

 private:
  const Mesh& mesh_;
  const ScalarField& g_;
  Dofs dofs_;
  SpMat a_;
};

// One continuation step from (x, lam) to lam_next; x is updated on success.
bool continuation_step(const NonlinearProblem& p, Vec& x, double lam, double lam_next, const SolverConfig& config,
                       int& iterations, double& residual) {
  const Vec predictor = x + (lam_next - lam) * p.tangent(x, lam);
  for (const Vec* start : {&predictor, static_cast<const Vec*>(&x)}) {
    Vec trial = *start;
    const auto r = p.newton(trial, lam_next, config);
    iterations += r.iterations;
    // the minimal branch is increasing in lambda when g is positive
    if (r.converged && r.stable && (trial - x).minCoeff() >= -1e-9 * std::max(1.0, x.cwiseAbs().maxCoeff())) {
      x = std::move(trial);
      residual = r.residual;
      return true;
    }
  }
  return false;
}

std::vector<std::vector<int>> second_rings(const Mesh& mesh) {
  const auto nb = vertex_neighbors(mesh);
  std::vector<std::vector<int>> ring(mesh.num_vertices());
  std::vector<int> mark(mesh.num_vertices(), -1);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    auto& r = ring[v];
    mark[v] = v;
    r.push_back(v);
    for (int a : nb[v]) {
      if (mark[a] != v) { mark[a] = v; r.push_back(a); }
      for (int b : nb[a]) {
        if (mark[b] != v) { mark[b] = v; r.push_back(b); }
      }
    }
  }
  return ring;
}

}  // namespace

double SolutionField::max_value() const { return values.empty() ? 0.0 : values[argmax()]; }

int SolutionField::argmax() const {
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

std::vector<Eigen::Vector2d> recover_gradients(const Mesh& mesh, const std::vector<double>& values) {
  std::vector<Eigen::Vector2d> grad(mesh.num_vertices(), Eigen::Vector2d::Zero());
  std::vector<double> weight(mesh.num_vertices(), 0.0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    const double area = mesh.area(t);
    const auto g = scaled_basis_gradients(mesh, tri);
    Eigen::Vector2d gt = Eigen::Vector2d::Zero();
    for (int k = 0; k < 3; ++k) gt += values[tri[k]] * g[k];
    gt /= 2.0 * area;
    for (int k = 0; k < 3; ++k) {
      grad[tri[k]] += area * gt;
      weight[tri[k]] += area;
    }
  }
  for (int i = 0; i < mesh.num_vertices(); ++i)
    if (weight[i] > 0) grad[i] /= weight[i];
  return grad;
}

std::vector<Eigen::Matrix2d> recover_hessians(const Mesh& mesh, const std::vector<double>& values) {
  const auto rings = second_rings(mesh);
  std::vector<Eigen::Matrix2d> hess(mesh.num_vertices(), Eigen::Matrix2d::Zero());
  const double s = mesh.h > 0 ? mesh.h : 1.0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const auto& patch = rings[v];
    if (patch.size() < 6) continue;
    Eigen::MatrixXd m(patch.size(), 6);
    Eigen::VectorXd rhs(patch.size());
    for (std::size_t k = 0; k < patch.size(); ++k) {
      const Point d = (mesh.vertices[patch[k]] - mesh.vertices[v]) / s;
      m.row(k) << 1.0, d.x(), d.y(), 0.5 * d.x() * d.x(), d.x() * d.y(), 0.5 * d.y() * d.y();
      rhs[k] = values[patch[k]];
    }
    const Eigen::VectorXd c = m.colPivHouseholderQr().solve(rhs);
    hess[v] << c[3], c[4], c[4], c[5];
    hess[v] /= s * s;
  }
  return hess;
}

SolutionField make_solution(std::shared_ptr<const Mesh> mesh, std::vector<double> values) {
  if (!mesh || static_cast<int>(values.size()) != mesh->num_vertices())
    throw Error(ErrorKind::InvalidArgument, "nodal values do not match the mesh");
  SolutionField sol;
  sol.gradients = recover_gradients(*mesh, values);
  sol.hessians = recover_hessians(*mesh, values);
  sol.values = std::move(values);
  sol.mesh = std::move(mesh);
  return sol;
}

SolutionField solve_poisson(std::shared_ptr<const Mesh> mesh, const ScalarField& f, const SolverConfig& config) {
  const Dofs dofs = number_dofs(*mesh);
  if (dofs.count() == 0) throw Error(ErrorKind::InvalidArgument, "mesh has no interior vertices");
  const SpMat a = assemble_stiffness(*mesh, dofs);
  const auto& verts = mesh->vertices;
  const Vec b = assemble_load(*mesh, dofs, [&](int i, int j) { return f(0.5 * (verts[i] + verts[j])); });
  Vec x = Vec::Zero(dofs.count());
  int iterations = 0;
  double residual = 0.0;
  if (b.norm() > 0) {
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg;
    cg.setTolerance(config.cg_tol);
    cg.setMaxIterations(config.cg_max_iterations);
    cg.compute(a);
    x = cg.solve(b);
    iterations = static_cast<int>(cg.iterations());
    residual = (a * x - b).norm() / b.norm();
    if (!std::isfinite(residual) || residual > config.residual_tol)
      throw Error(ErrorKind::SolverStagnation,
                  "conjugate gradients stalled at relative residual " + std::to_string(residual));
  }
  auto nodal = to_nodal(*mesh, dofs, x);
  SolutionField sol = make_solution(std::move(mesh), std::move(nodal));
  sol.kind = ProblemKind::Poisson;
  sol.forcing = f.str();
  sol.residual = residual;
  sol.iterations = iterations;
  return sol;
}

SolutionField solve_nonlinear(std::shared_ptr<const Mesh> mesh, const ScalarField& g, double lambda, int steps,
                              const SolverConfig& config, const std::vector<double>* warm_start) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::InvalidArgument, "lambda must be >= 0");
  if (steps < 1) throw Error(ErrorKind::InvalidArgument, "continuation needs at least one step");
  const NonlinearProblem problem(*mesh, g);
  const Dofs& dofs = problem.dofs();
  if (dofs.count() == 0) throw Error(ErrorKind::InvalidArgument, "mesh has no interior vertices");

  Vec x = Vec::Zero(dofs.count());
  int iterations = 0;
  double residual = 0.0;
  bool done = lambda == 0.0;

  if (!done && warm_start) {
    if (static_cast<int>(warm_start->size()) != mesh->num_vertices())
      throw Error(ErrorKind::InvalidArgument, "warm start does not match the mesh");
    Vec trial = from_nodal(dofs, *warm_start);
    const auto r = problem.newton(trial, lambda, config);
    iterations += r.iterations;
    // accepted only if Newton lands on a stable solution; otherwise fall back
    // to continuation from zero
    if (r.converged && r.stable && trial.minCoeff() >= 0.0) {
      x = std::move(trial);
      residual = r.residual;
      done = true;
    }
  }

  if (!done) {
    const double full = lambda / steps;
    double lam = 0.0, dl = full;
    int halvings = 0;
    while (lam < lambda) {
      const double next = (lambda - lam <= dl * (1 + 1e-12)) ? lambda : lam + dl;
      if (continuation_step(problem, x, lam, next, config, iterations, residual)) {
        lam = next;
        dl = std::min(full, 2 * dl);
      } else {
        dl *= 0.5;
        if (++halvings > config.max_step_halvings)
          throw ContinuationError(lam, "no stable solution beyond lambda = " + std::to_string(lam));
      }
    }
  }

  SolutionField sol = make_solution(mesh, to_nodal(*mesh, dofs, x));
  sol.kind = ProblemKind::Nonlinear;
  sol.forcing = g.str();
  sol.lambda = lambda;
  sol.residual = residual;
  sol.iterations = iterations;
  return sol;
}

StabilityInfo stability_eigenvalue(const SolutionField& sol, const ScalarField& gprime, double lambda,
                                   const SolverConfig& config) {
  const Mesh& mesh = *sol.mesh;
  const Dofs dofs = number_dofs(mesh);
  if (dofs.count() == 0) throw Error(ErrorKind::InvalidArgument, "mesh has no interior vertices");
  const auto& u = sol.values;
  double gmax = 0.0;
  const SpMat gm = assemble_weighted_mass(mesh, dofs, [&](int i, int j) {
    const double v = gprime(0.5 * (u[i] + u[j]));
    gmax = std::max(gmax, std::abs(v));
    return v;
  });
  const SpMat mass = assemble_weighted_mass(mesh, dofs, [](int, int) { return 1.0; });
  const SpMat op = assemble_stiffness(mesh, dofs) - lambda * gm;
  // G <= max|g'| M, so this shift keeps the shifted operator positive definite
  const double shift = -lambda * gmax - 1.0;
  Eigen::SimplicialLDLT<SpMat> ldlt(SpMat(op - shift * mass));
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::EigenSolveFailure, "factorization failed");

  Vec x = Vec::Ones(dofs.count());
  StabilityInfo info;
  for (int it = 1; it <= config.eigen_max_iterations; ++it) {
    x = ldlt.solve(mass * x);
    x /= x.norm();
    const Vec ox = op * x, mx = mass * x;
    const double mu = x.dot(ox) / x.dot(mx);
    const double res = (ox - mu * mx).norm();
    if (!std::isfinite(res)) break;
    if (res <= config.eigen_tol) {
      info.mu1 = mu;
      info.residual = res;
      info.iterations = it;
      if (x.sum() < 0) x = -x;
      x /= x.cwiseAbs().maxCoeff();
      info.eigenfunction = to_nodal(mesh, dofs, x);
      info.classification = mu > config.stability_tol      ? Stability::Stable
                            : mu >= -config.stability_tol ? Stability::SemiStable
                                                          : Stability::Unstable;
      return info;
    }
  }
  throw Error(ErrorKind::EigenSolveFailure, "inverse iteration did not reach the residual tolerance");
}

LambdaStarEstimate lambda_star_estimate(std::shared_ptr<const Mesh> mesh, const ScalarField& g,
                                        const SolverConfig& config) {
  const NonlinearProblem problem(*mesh, g);
  if (problem.dofs().count() == 0) throw Error(ErrorKind::InvalidArgument, "mesh has no interior vertices");
  LambdaStarEstimate est;
  est.upper = std::numeric_limits<double>::infinity();
  Vec x = Vec::Zero(problem.dofs().count());
  double lam = 0.0, dl = 0.125;
  int iterations = 0;
  double residual = 0.0;
  while (est.upper - lam > config.lambda_resolution) {
    if (est.solves >= config.lambda_max_solves || lam >= config.lambda_budget) {
      est.budget_exhausted = true;
      break;
    }
    const double next = std::isinf(est.upper) ? lam + dl : 0.5 * (lam + est.upper);
    ++est.solves;
    if (continuation_step(problem, x, lam, next, config, iterations, residual)) {
      lam = next;
      dl *= 2;
    } else {
      est.upper = next;
    }
  }
  est.lower = lam;
  est.lambda_star = std::isinf(est.upper) ? lam : 0.5 * (lam + est.upper);
  return est;
}

std::optional<PointSample> sample_solution(const SolutionField& sol, const MeshLocator& locator, const Point& p,
                                           double reach) {
  const auto hit = reach > 0 ? locator.locate_nearest(p, reach) : locator.locate(p);
  if (!hit) return std::nullopt;
  const Triangle& t = sol.mesh->triangles[hit->triangle];
  PointSample s;
  for (int k = 0; k < 3; ++k) {
    const double w = hit->barycentric[k];
    s.value += w * sol.values[t[k]];
    s.gradient += w * sol.gradients[t[k]];
    s.hessian += w * sol.hessians[t[k]];
  }
  return s;
}

SolutionDifference compare_solutions(const SolutionField& a, const SolutionField& b, double margin) {
  const Mesh& ma = *a.mesh;
  const Mesh& mb = *b.mesh;
  const MeshLocator locator(mb);
  std::vector<Point> rim;
  if (margin > 0) {
    for (const Mesh* m : {&ma, &mb})
      for (int i = 0; i < m->num_vertices(); ++i)
        if (m->boundary[i]) rim.push_back(m->vertices[i]);
  }
  SolutionDifference d;
  for (int i = 0; i < ma.num_vertices(); ++i) {
    if (ma.boundary[i]) continue;
    const Point& p = ma.vertices[i];
    if (margin > 0 &&
        std::any_of(rim.begin(), rim.end(), [&](const Point& q) { return (q - p).squaredNorm() < margin * margin; }))
      continue;
    const auto s = sample_solution(b, locator, p);
    if (!s) continue;
    ++d.samples;
    d.sup[0] = std::max(d.sup[0], std::abs(a.values[i] - s->value));
    d.sup[1] = std::max(d.sup[1], (a.gradients[i] - s->gradient).cwiseAbs().maxCoeff());
    d.sup[2] = std::max(d.sup[2], (a.hessians[i] - s->hessian).cwiseAbs().maxCoeff());
  }
  if (d.samples == 0) throw Error(ErrorKind::EmptyIntersection, "no shared sample points");
  return d;
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::SemiStable: return "semi-stable";
    case Stability::Unstable: return "unstable";
  }
  return "unknown";
}

namespace {

std::string kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::Poisson: return "poisson";
    case ProblemKind::Nonlinear: return "nonlinear";
    case ProblemKind::Given: return "given";
  }
  return "given";
}

}  // namespace

void to_json(nlohmann::json& j, const SolutionField& sol) {
  const Mesh& m = *sol.mesh;
  auto verts = nlohmann::json::array();
  for (const auto& p : m.vertices) verts.push_back({p.x(), p.y()});
  auto grads = nlohmann::json::array();
  for (const auto& g : sol.gradients) grads.push_back({g.x(), g.y()});
  auto hess = nlohmann::json::array();
  for (const auto& h : sol.hessians) hess.push_back({h(0, 0), h(0, 1), h(1, 1)});
  std::vector<int> boundary(m.boundary.begin(), m.boundary.end());
  j = nlohmann::json{{"kind", kind_name(sol.kind)},
                     {"forcing", sol.forcing},
                     {"lambda", sol.lambda},
                     {"residual", sol.residual},
                     {"iterations", sol.iterations},
                     {"h", m.h},
                     {"vertices", verts},
                     {"triangles", m.triangles},
                     {"boundary", boundary},
                     {"values", sol.values},
                     {"gradients", grads},
                     {"hessians", hess}};
}

SolutionField solution_from_json(const nlohmann::json& j) {
  try {
    auto mesh = std::make_shared<Mesh>();
    for (const auto& p : j.at("vertices")) mesh->vertices.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    mesh->triangles = j.at("triangles").get<std::vector<Triangle>>();
    for (int b : j.at("boundary").get<std::vector<int>>()) mesh->boundary.push_back(static_cast<char>(b != 0));
    mesh->h = j.at("h").get<double>();
    if (mesh->boundary.size() != mesh->vertices.size())
      throw Error(ErrorKind::InvalidArgument, "boundary flags do not match vertices");
    for (const auto& t : mesh->triangles)
      for (int v : t)
        if (v < 0 || v >= mesh->num_vertices()) throw Error(ErrorKind::InvalidArgument, "triangle index out of range");
    // derivatives are always recomputed so that the file cannot disagree with them
    SolutionField sol = make_solution(mesh, j.at("values").get<std::vector<double>>());
    const std::string kind = j.value("kind", "given");
    sol.kind = kind == "poisson" ? ProblemKind::Poisson : kind == "nonlinear" ? ProblemKind::Nonlinear : ProblemKind::Given;
    sol.forcing = j.value("forcing", "");
    sol.lambda = j.value("lambda", 0.0);
    sol.residual = j.value("residual", 0.0);
    sol.iterations = j.value("iterations", 0);
    return sol;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("solution file: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const StabilityInfo& s) {
  j = nlohmann::json{{"mu1", s.mu1},
                     {"classification", to_string(s.classification)},
                     {"residual", s.residual},
                     {"iterations", s.iterations}};
}

void to_json(nlohmann::json& j, const LambdaStarEstimate& e) {
  j = nlohmann::json{{"lambda_star", e.lambda_star},
                     {"lower", e.lower},
                     {"upper", std::isinf(e.upper) ? nlohmann::json(nullptr) : nlohmann::json(e.upper)},
                     {"budget_exhausted", e.budget_exhausted},
                     {"solves", e.solves}};
}

}  // namespace critshape
