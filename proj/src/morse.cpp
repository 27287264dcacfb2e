#include "critshape/morse.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <Eigen/QR>
#include <nlohmann/json.hpp>

#include "critshape/error.hpp"

namespace critshape {

namespace {

struct Segment {
  Point a, b;
};

std::vector<Segment> boundary_segments(const Mesh& mesh) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++count[{a, b}];
    }
  std::vector<Segment> out;
  for (const auto& [e, c] : count)
    if (c == 1) out.push_back({mesh.vertices[e.first], mesh.vertices[e.second]});
  return out;
}

double distance_to(const std::vector<Segment>& segs, const Point& p) {
  double d2 = std::numeric_limits<double>::infinity();
  for (const auto& s : segs) {
    const Point ab = s.b - s.a;
    const double t = std::clamp((p - s.a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    d2 = std::min(d2, (s.a + t * ab - p).squaredNorm());
  }
  return std::sqrt(d2);
}

double mesh_diameter(const Mesh& mesh) {
  Eigen::AlignedBox<double, 2> box;
  for (const auto& p : mesh.vertices) box.extend(p);
  return box.diagonal().norm();
}

}  // namespace

LocalFitter::LocalFitter(const SolutionField& sol, double radius) : sol_(&sol), radius_(radius) {
  if (!(radius > 0)) throw Error(ErrorKind::InvalidArgument, "fit radius must be positive");
  const Mesh& m = *sol.mesh;
  Eigen::AlignedBox<double, 2> box;
  for (const auto& p : m.vertices) box.extend(p);
  lo_ = box.min();
  nx_ = std::max(1, static_cast<int>(std::ceil(box.sizes().x() / radius)));
  ny_ = std::max(1, static_cast<int>(std::ceil(box.sizes().y() / radius)));
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (int i = 0; i < m.num_vertices(); ++i) {
    const int ix = std::clamp(static_cast<int>((m.vertices[i].x() - lo_.x()) / radius), 0, nx_ - 1);
    const int iy = std::clamp(static_cast<int>((m.vertices[i].y() - lo_.y()) / radius), 0, ny_ - 1);
    buckets_[iy * nx_ + ix].push_back(i);
  }
}

std::optional<LocalModel> LocalFitter::fit(const Point& p) const {
  const Mesh& m = *sol_->mesh;
  const int cx = static_cast<int>(std::floor((p.x() - lo_.x()) / radius_));
  const int cy = static_cast<int>(std::floor((p.y() - lo_.y()) / radius_));
  std::vector<int> idx;
  std::vector<double> w;
  for (int iy = std::max(0, cy - 1); iy <= std::min(ny_ - 1, cy + 1); ++iy)
    for (int ix = std::max(0, cx - 1); ix <= std::min(nx_ - 1, cx + 1); ++ix)
      for (int i : buckets_[iy * nx_ + ix]) {
        const double rho2 = (m.vertices[i] - p).squaredNorm() / (radius_ * radius_);
        if (rho2 >= 1.0) continue;
        idx.push_back(i);
        w.push_back((1 - rho2) * (1 - rho2));
      }
  // Quartic fit: the cubic terms keep the gradient and the quartic terms the
  // Hessian free of O(R^2) bias.
  if (idx.size() < 24) return std::nullopt;
  Eigen::MatrixXd a(idx.size(), 15);
  Eigen::VectorXd rhs(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const Point d = (m.vertices[idx[k]] - p) / radius_;
    const double x = d.x(), y = d.y();
    a.row(k) << 1.0, x, y, 0.5 * x * x, x * y, 0.5 * y * y, x * x * x, x * x * y, x * y * y, y * y * y, x * x * x * x,
        x * x * x * y, x * x * y * y, x * y * y * y, y * y * y * y;
    a.row(k) *= std::sqrt(w[k]);
    rhs[k] = std::sqrt(w[k]) * sol_->values[idx[k]];
  }
  const auto qr = a.colPivHouseholderQr();
  if (qr.rank() < 15) return std::nullopt;
  const Eigen::VectorXd c = qr.solve(rhs);
  LocalModel model;
  model.value = c[0];
  model.gradient = Eigen::Vector2d(c[1], c[2]) / radius_;
  model.hessian << c[3], c[4], c[4], c[5];
  model.hessian /= radius_ * radius_;
  model.support = static_cast<int>(idx.size());
  return model;
}

MorseType classify(const Eigen::Matrix2d& hessian, double tol, bool* nondegenerate) {
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(hessian, Eigen::EigenvaluesOnly).eigenvalues();
  const double norm = std::max(std::abs(ev[0]), std::abs(ev[1]));
  const bool nd = std::abs(hessian.determinant()) > tol * norm * norm && norm > 0;
  if (nondegenerate) *nondegenerate = nd;
  if (!nd) return MorseType::Degenerate;
  if (ev[1] < 0) return MorseType::Max;
  if (ev[0] > 0) return MorseType::Min;
  return MorseType::Saddle;
}

std::string to_string(MorseType t) {
  switch (t) {
    case MorseType::Max: return "max";
    case MorseType::Min: return "min";
    case MorseType::Saddle: return "saddle";
    case MorseType::Degenerate: return "degenerate";
  }
  return "degenerate";
}

MorseCounts count_types(const std::vector<CriticalPoint>& points) {
  MorseCounts c;
  for (const auto& p : points) {
    switch (p.type) {
      case MorseType::Max: ++c.maxima; break;
      case MorseType::Min: ++c.minima; break;
      case MorseType::Saddle: ++c.saddles; break;
      case MorseType::Degenerate: ++c.degenerate; break;
    }
  }
  return c;
}

std::vector<CriticalPoint> find_critical_points(const SolutionField& sol, const MorseConfig& config) {
  const Mesh& mesh = *sol.mesh;
  const double h = mesh.h;
  if (!(h > 0)) throw Error(ErrorKind::InvalidArgument, "mesh size is not set");
  const auto segs = boundary_segments(mesh);
  const auto nb = vertex_neighbors(mesh);
  const MeshLocator locator(mesh);
  const LocalFitter fitter(sol, config.fit_radius * std::sqrt(h * mesh_diameter(mesh) / 20.0));
  double umax = 0.0;
  for (double v : sol.values) umax = std::max(umax, std::abs(v));
  const double gtol = config.gradient_tol * std::max(umax, 1e-300) / mesh_diameter(mesh);
  const double exclusion = config.boundary_exclusion * h;

  std::vector<char> eligible(mesh.num_vertices(), 0);
  for (int i = 0; i < mesh.num_vertices(); ++i)
    eligible[i] = !mesh.boundary[i] && distance_to(segs, mesh.vertices[i]) >= exclusion;

  std::vector<CriticalPoint> found;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (!eligible[i]) continue;
    const double gi = sol.gradients[i].norm();
    if (std::any_of(nb[i].begin(), nb[i].end(), [&](int j) { return sol.gradients[j].norm() < gi; })) continue;

    Point p = mesh.vertices[i];
    std::optional<LocalModel> model;
    bool converged = false;
    for (int it = 0; it < config.max_iterations; ++it) {
      model = fitter.fit(p);
      if (!model) break;
      if (model->gradient.norm() <= gtol) {
        converged = true;
        break;
      }
      const double det = model->hessian.determinant();
      if (!(std::abs(det) > 0)) break;
      Eigen::Vector2d step = -model->hessian.inverse() * model->gradient;
      const double len = step.norm();
      if (len > fitter.radius()) step *= fitter.radius() / len;
      p += step;
      if (!locator.locate(p)) break;
    }
    if (!converged || distance_to(segs, p) < exclusion) continue;
    CriticalPoint c;
    c.location = p;
    c.gradient_norm = model->gradient.norm();
    c.hessian = model->hessian;
    c.determinant = model->hessian.determinant();
    c.type = classify(c.hessian, config.hessian_tol, &c.nondegenerate);
    found.push_back(c);
  }

  std::sort(found.begin(), found.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    return a.location.x() != b.location.x() ? a.location.x() < b.location.x() : a.location.y() < b.location.y();
  });
  std::vector<CriticalPoint> unique;
  const double r = config.dedup_radius * h;
  for (const auto& c : found) {
    if (std::none_of(unique.begin(), unique.end(),
                     [&](const CriticalPoint& u) { return (u.location - c.location).norm() < r; }))
      unique.push_back(c);
  }
  return unique;
}

PushforwardReport pushforward_residuals(const ConformalMap& map, const SolutionField& u, const SolutionField& v,
                                        const MorseConfig& config) {
  PushforwardReport rep;
  const Mesh& mu = *u.mesh;
  const MeshLocator vloc(*v.mesh);
  for (int i = 0; i < mu.num_vertices(); ++i) {
    if (mu.boundary[i]) continue;
    const Complex zeta = map(mu.vertices[i]);
    const auto s = sample_solution(v, vloc, to_point(zeta), 2 * v.mesh->h);
    if (!s) continue;
    ++rep.value_samples;
    rep.value_sup = std::max(rep.value_sup, std::abs(s->value - u.values[i]));
  }

  const auto cu = find_critical_points(u, config);
  const auto cv = find_critical_points(v, config);
  if (cu.size() != cv.size())
    throw Error(ErrorKind::CriticalPointMismatch, std::to_string(cu.size()) + " critical points in the domain, " +
                                                     std::to_string(cv.size()) + " in the image");
  std::vector<char> used(cu.size(), 0);
  for (const auto& c : cv) {
    PushforwardPair pair;
    pair.v_point = to_complex(c.location);
    pair.pulled_back = inverse(map, pair.v_point);
    int best = -1;
    for (std::size_t k = 0; k < cu.size(); ++k) {
      if (used[k]) continue;
      if (best < 0 || (cu[k].location - pair.pulled_back).norm() < (cu[best].location - pair.pulled_back).norm())
        best = static_cast<int>(k);
    }
    used[best] = 1;
    pair.u_point = cu[best].location;
    pair.location_error = (pair.u_point - pair.pulled_back).norm();
    pair.det_u = cu[best].determinant;
    pair.det_v = c.determinant;
    pair.inverse_modulus = 1.0 / std::abs(map.derivative(pair.pulled_back));
    pair.det_residual = std::abs(pair.det_v - pair.det_u * std::pow(pair.inverse_modulus, 4));
    rep.max_det_residual = std::max(rep.max_det_residual, pair.det_residual);
    rep.max_location_error = std::max(rep.max_location_error, pair.location_error);
    rep.pairs.push_back(pair);
  }
  return rep;
}

FamilyReport track_family(const StarDomain& base, const ChiProfile& profile, std::vector<double> epsilons,
                          const NonlinearSpec& problem, double h, const SolverConfig& solver,
                          const MorseConfig& morse) {
  if (!is_convex(base).convex) throw Error(ErrorKind::InvalidArgument, "base domain is not convex");
  const ScalarField g(problem.g);
  const ScalarField gprime = g.derivative_field(0);
  FamilyReport rep;
  rep.base = base;
  rep.h = h;

  const auto base_mesh = std::make_shared<const Mesh>(triangulate(base, h));
  const SolutionField limit = solve_nonlinear(base_mesh, g, problem.lambda, problem.steps, solver);
  rep.limit_points = find_critical_points(limit, morse);
  rep.limit_mu1 = stability_eigenvalue(limit, gprime, problem.lambda, solver).mu1;
  rep.limit_max_value = limit.max_value();

  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());
  const std::vector<double>* warm = &limit.values;
  std::vector<double> previous;
  for (double eps : epsilons) {
    FamilyEntry e;
    e.epsilon = eps;
    try {
      const StarDomain domain = perturb_domain(base, profile, eps);
      Mesh mapped = map_mesh_radially(*base_mesh, base, domain);
      const auto q = mesh_quality(mapped);
      std::shared_ptr<const Mesh> mesh;
      if (q.min_angle_degrees >= kMinAngleDegrees && q.min_area > 0) {
        mesh = std::make_shared<const Mesh>(std::move(mapped));
      } else {
        mesh = std::make_shared<const Mesh>(triangulate(domain, h));
        e.remeshed = true;
      }
      const bool same_connectivity = !e.remeshed && warm && static_cast<int>(warm->size()) == mesh->num_vertices();
      const SolutionField sol = solve_nonlinear(mesh, g, problem.lambda, problem.steps, solver,
                                                same_connectivity ? warm : nullptr);
      const auto st = stability_eigenvalue(sol, gprime, problem.lambda, solver);
      e.mu1 = st.mu1;
      e.stability = st.classification;
      e.points = find_critical_points(sol, morse);
      e.max_value = sol.max_value();
      for (const auto& c : e.points) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& pc : rep.limit_points) d = std::min(d, (c.location - pc.location).norm());
        e.distance_to_limit = std::max(e.distance_to_limit, d);
        e.norm_of_location = std::max(e.norm_of_location, c.location.norm());
      }
      e.difference = compare_solutions(sol, limit, morse.boundary_exclusion * h);
      e.ok = true;
      if (!e.remeshed) {
        previous = sol.values;
        warm = &previous;
      }
    } catch (const Error& err) {
      e.error = err.what();
    }
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

void to_json(nlohmann::json& j, const CriticalPoint& c) {
  j = nlohmann::json{{"x", c.location.x()},
                     {"y", c.location.y()},
                     {"gradient_norm", c.gradient_norm},
                     {"hessian", {{c.hessian(0, 0), c.hessian(0, 1)}, {c.hessian(1, 0), c.hessian(1, 1)}}},
                     {"determinant", c.determinant},
                     {"type", to_string(c.type)},
                     {"nondegenerate", c.nondegenerate}};
}

void to_json(nlohmann::json& j, const PushforwardReport& r) {
  auto pairs = nlohmann::json::array();
  for (const auto& p : r.pairs)
    pairs.push_back({{"u_point", {p.u_point.x(), p.u_point.y()}},
                     {"v_point", {p.v_point.real(), p.v_point.imag()}},
                     {"pulled_back", {p.pulled_back.x(), p.pulled_back.y()}},
                     {"location_error", p.location_error},
                     {"det_u", p.det_u},
                     {"det_v", p.det_v},
                     {"inverse_modulus", p.inverse_modulus},
                     {"det_residual", p.det_residual}});
  j = nlohmann::json{{"value_sup", r.value_sup},
                     {"value_samples", r.value_samples},
                     {"pairs", pairs},
                     {"max_det_residual", r.max_det_residual},
                     {"max_location_error", r.max_location_error}};
}

void to_json(nlohmann::json& j, const FamilyReport& r) {
  auto entries = nlohmann::json::array();
  for (const auto& e : r.entries) {
    nlohmann::json je{{"epsilon", e.epsilon}, {"ok", e.ok}};
    if (!e.ok) {
      je["error"] = e.error;
    } else {
      je["critical_points"] = e.points;
      je["count"] = e.points.size();
      je["mu1"] = e.mu1;
      je["stability"] = to_string(e.stability);
      je["max_value"] = e.max_value;
      je["distance_to_limit"] = e.distance_to_limit;
      je["norm_of_location"] = e.norm_of_location;
      je["sup_norms"] = {e.difference.sup[0], e.difference.sup[1], e.difference.sup[2]};
      je["remeshed"] = e.remeshed;
    }
    entries.push_back(std::move(je));
  }
  j = nlohmann::json{{"base", r.base},
                     {"h", r.h},
                     {"limit_critical_points", r.limit_points},
                     {"limit_mu1", r.limit_mu1},
                     {"limit_max_value", r.limit_max_value},
                     {"entries", entries}};
}

}  // namespace critshape
