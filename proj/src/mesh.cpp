#include "critshape/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <set>

#include <Eigen/Geometry>

#include "critshape/error.hpp"

namespace critshape {

namespace {

constexpr int kSmoothingPasses = 6;
constexpr int kRefinementRounds = 12;

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double min_angle(const Point& a, const Point& b, const Point& c) {
  auto angle = [](const Point& p, const Point& q, const Point& r) {
    const Point u = q - p, v = r - p;
    return std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
  };
  return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

Point circumcenter(const Point& a, const Point& b, const Point& c) {
  const Point b1 = b - a, c1 = c - a;
  const double d = 2.0 * (b1.x() * c1.y() - b1.y() * c1.x());
  const double bb = b1.squaredNorm(), cc = c1.squaredNorm();
  return a + Point((c1.y() * bb - b1.y() * cc) / d, (b1.x() * cc - c1.x() * bb) / d);
}

double distance_to_segment(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + s * ab - p).norm();
}

// Distance queries against a closed polyline through a bucket grid.
class BoundaryDistance {
 public:
  BoundaryDistance(std::vector<Point> poly, double cell) : poly_(std::move(poly)), cell_(cell) {
    Eigen::AlignedBox<double, 2> box;
    for (const auto& p : poly_) box.extend(p);
    lo_ = box.min() - Point(cell_, cell_);
    nx_ = static_cast<int>(box.sizes().x() / cell_) + 3;
    ny_ = static_cast<int>(box.sizes().y() / cell_) + 3;
    buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
    const int n = static_cast<int>(poly_.size());
    for (int i = 0; i < n; ++i) {
      Eigen::AlignedBox<double, 2> seg;
      seg.extend(poly_[i]);
      seg.extend(poly_[(i + 1) % n]);
      const int x0 = ix(seg.min().x()), x1 = ix(seg.max().x());
      const int y0 = iy(seg.min().y()), y1 = iy(seg.max().y());
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) buckets_[static_cast<std::size_t>(y) * nx_ + x].push_back(i);
    }
  }

  // min(distance, cap) where cap is at most one cell
  double distance(const Point& p, double cap) const {
    double best = cap;
    const int n = static_cast<int>(poly_.size());
    const int cx = ix(p.x()), cy = iy(p.y());
    for (int y = cy - 1; y <= cy + 1; ++y) {
      for (int x = cx - 1; x <= cx + 1; ++x) {
        if (x < 0 || y < 0 || x >= nx_ || y >= ny_) continue;
        for (int i : buckets_[static_cast<std::size_t>(y) * nx_ + x])
          best = std::min(best, distance_to_segment(p, poly_[i], poly_[(i + 1) % n]));
      }
    }
    return best;
  }

 private:
  int ix(double x) const { return std::clamp(static_cast<int>((x - lo_.x()) / cell_), 0, nx_ - 1); }
  int iy(double y) const { return std::clamp(static_cast<int>((y - lo_.y()) / cell_), 0, ny_ - 1); }

  std::vector<Point> poly_;
  double cell_;
  Point lo_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

struct Builder {
  const StarDomain& domain;
  double h;
  std::vector<double> boundary_angles;  // sorted, one per boundary vertex
  std::vector<Point> interior;
  std::unique_ptr<BoundaryDistance> distance;

  std::vector<Point> points() const {
    std::vector<Point> pts;
    pts.reserve(boundary_angles.size() + interior.size());
    for (double t : boundary_angles) pts.push_back(domain.boundary_point(t));
    pts.insert(pts.end(), interior.begin(), interior.end());
    return pts;
  }

  int nb() const { return static_cast<int>(boundary_angles.size()); }

  void rebuild_distance() {
    std::vector<Point> fine;
    const int n = nb();
    for (int i = 0; i < n; ++i) {
      const double t0 = boundary_angles[i];
      double t1 = boundary_angles[(i + 1) % n];
      if (t1 <= t0) t1 += 2 * std::numbers::pi;
      for (int k = 0; k < 4; ++k) fine.push_back(domain.boundary_point(t0 + (t1 - t0) * k / 4.0));
    }
    distance = std::make_unique<BoundaryDistance>(std::move(fine), h);
  }

  // Triangles of the Delaunay triangulation that lie inside the domain.
  std::vector<Triangle> triangulate_inside(const std::vector<Point>& pts) const {
    auto all = delaunay(pts);
    std::vector<Triangle> kept;
    kept.reserve(all.size());
    for (const auto& t : all) {
      const Point c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
      if (contains(domain, c)) kept.push_back(t);
    }
    return kept;
  }

  // Boundary edges (i, i+1) absent from the triangulation.
  std::vector<int> missing_boundary_edges(const std::vector<Triangle>& tris) const {
    std::set<std::pair<int, int>> edges;
    for (const auto& t : tris) {
      for (int k = 0; k < 3; ++k) {
        const int a = t[k], b = t[(k + 1) % 3];
        if (a < nb() && b < nb()) edges.insert({std::min(a, b), std::max(a, b)});
      }
    }
    std::vector<int> missing;
    for (int i = 0; i < nb(); ++i) {
      const int j = (i + 1) % nb();
      if (!edges.count({std::min(i, j), std::max(i, j)})) missing.push_back(i);
    }
    return missing;
  }

  void split_boundary_edges(std::vector<int> edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    const int n = nb();
    std::vector<double> added;
    for (int i : edges) {
      const double t0 = boundary_angles[i];
      double t1 = boundary_angles[(i + 1) % n];
      if (t1 <= t0) t1 += 2 * std::numbers::pi;
      added.push_back(std::fmod(0.5 * (t0 + t1), 2 * std::numbers::pi));
    }
    boundary_angles.insert(boundary_angles.end(), added.begin(), added.end());
    std::sort(boundary_angles.begin(), boundary_angles.end());
    // drop interior points that now crowd the refined boundary
    const double keep = 0.45 * h;
    rebuild_distance();
    std::erase_if(interior, [&](const Point& p) { return distance->distance(p, h) < keep * 0.5; });
  }
};

}  // namespace

double Mesh::area(int t) const {
  const auto& tri = triangles[t];
  return signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

MeshQuality mesh_quality(const Mesh& mesh) {
  MeshQuality q;
  q.vertices = mesh.num_vertices();
  q.triangles = mesh.num_triangles();
  q.min_angle_degrees = 180.0;
  q.min_area = std::numeric_limits<double>::infinity();
  std::set<std::pair<int, int>> edges;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point &a = mesh.vertices[tri[0]], &b = mesh.vertices[tri[1]], &c = mesh.vertices[tri[2]];
    q.min_angle_degrees = std::min(q.min_angle_degrees, min_angle(a, b, c) * 180.0 / std::numbers::pi);
    q.min_area = std::min(q.min_area, signed_area(a, b, c));
    for (int k = 0; k < 3; ++k) edges.insert({std::min(tri[k], tri[(k + 1) % 3]), std::max(tri[k], tri[(k + 1) % 3])});
  }
  q.edges = static_cast<int>(edges.size());
  return q;
}

Mesh triangulate(const StarDomain& domain, double h) {
  const double diameter = domain.diameter();
  if (!(h > 0.0) || h >= diameter)
    throw Error(ErrorKind::MeshQualityFailure, "target size h must lie in (0, diameter)");

  Builder b{domain, h, {}, {}, nullptr};
  const int nb = std::max(8, static_cast<int>(std::ceil(domain.perimeter() / h)));
  b.boundary_angles = domain.arclength_angles(nb);
  for (auto& t : b.boundary_angles) t = std::fmod(t + 2 * std::numbers::pi, 2 * std::numbers::pi);
  std::sort(b.boundary_angles.begin(), b.boundary_angles.end());
  b.rebuild_distance();

  // hexagonal lattice seeding, kept away from the boundary
  const double rmax = domain.max_radius();
  const double dy = h * std::sqrt(3.0) / 2.0;
  const int ny = static_cast<int>(rmax / dy) + 1;
  const int nx = static_cast<int>(rmax / h) + 1;
  for (int j = -ny; j <= ny; ++j) {
    for (int i = -nx - 1; i <= nx; ++i) {
      // tiny deterministic jitter breaks the lattice's cocircular point sets
      const double jx = std::sin(12.9898 * i + 78.233 * j) * 43758.5453;
      const double jy = std::sin(39.3468 * i + 11.135 * j) * 24634.6345;
      const Point jitter(jx - std::floor(jx) - 0.5, jy - std::floor(jy) - 0.5);
      const Point p = Point((i + (j % 2 ? 0.5 : 0.0)) * h, j * dy) + 1e-3 * h * jitter;
      if (contains(domain, p) && b.distance->distance(p, h) >= 0.7 * h) b.interior.push_back(p);
    }
  }

  std::vector<Point> pts;
  std::vector<Triangle> tris;
  auto retriangulate = [&] {
    for (int attempt = 0; attempt < 8; ++attempt) {
      pts = b.points();
      tris = b.triangulate_inside(pts);
      auto missing = b.missing_boundary_edges(tris);
      if (missing.empty()) return;
      b.split_boundary_edges(std::move(missing));
    }
    throw Error(ErrorKind::MeshQualityFailure, "boundary edges could not be recovered");
  };
  retriangulate();

  // Laplacian smoothing of interior vertices
  for (int pass = 0; pass < kSmoothingPasses; ++pass) {
    const int n = static_cast<int>(pts.size());
    std::vector<Point> sum(n, Point::Zero());
    std::vector<int> count(n, 0);
    for (const auto& t : tris) {
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) {
          if (k == l) continue;
          sum[t[k]] += pts[t[l]];
          ++count[t[k]];
        }
      }
    }
    for (int i = b.nb(); i < n; ++i) {
      if (count[i] == 0) continue;
      const Point target = sum[i] / count[i];
      if (contains(domain, target) && b.distance->distance(target, h) >= 0.35 * h) b.interior[i - b.nb()] = target;
    }
    retriangulate();
  }

  // circumcenter refinement of skinny triangles
  const double bound = kMinAngleDegrees * std::numbers::pi / 180.0;
  for (int round = 0; round < kRefinementRounds; ++round) {
    std::vector<Point> inserts;
    std::vector<int> splits;
    for (const auto& t : tris) {
      const Point &p0 = pts[t[0]], &p1 = pts[t[1]], &p2 = pts[t[2]];
      if (min_angle(p0, p1, p2) >= bound + 1e-9) continue;
      const Point cc = circumcenter(p0, p1, p2);
      if (contains(domain, cc) && b.distance->distance(cc, h) >= 0.3 * h) {
        inserts.push_back(cc);
        continue;
      }
      // circumcenter near or beyond the curve: split the boundary edges instead
      for (int k = 0; k < 3; ++k) {
        const int i = t[k], j = t[(k + 1) % 3];
        if (i >= b.nb() || j >= b.nb()) continue;
        if (j == (i + 1) % b.nb()) splits.push_back(i);
        else if (i == (j + 1) % b.nb()) splits.push_back(j);
      }
      if (splits.empty()) {
        // shortest edge in the thin layer: drop the interior vertex of it
        for (int k = 0; k < 3; ++k) {
          if (t[k] >= b.nb()) {
            b.interior[t[k] - b.nb()] = Point(std::nan(""), 0.0);
            break;
          }
        }
      }
    }
    if (inserts.empty() && splits.empty()) {
      std::erase_if(b.interior, [](const Point& p) { return std::isnan(p.x()); });
      bool clean = true;
      for (const auto& t : tris) clean = clean && min_angle(pts[t[0]], pts[t[1]], pts[t[2]]) >= bound;
      if (clean) break;
      retriangulate();
      continue;
    }
    std::erase_if(b.interior, [](const Point& p) { return std::isnan(p.x()); });
    // keep inserted points apart from each other
    std::vector<Point> accepted;
    for (const auto& p : inserts) {
      bool far = true;
      for (const auto& q : accepted) far = far && (p - q).norm() > 0.25 * h;
      if (far) accepted.push_back(p);
    }
    b.interior.insert(b.interior.end(), accepted.begin(), accepted.end());
    if (!splits.empty()) b.split_boundary_edges(std::move(splits));
    retriangulate();
  }

  Mesh mesh;
  mesh.h = h;
  // compact: drop vertices no triangle uses
  std::vector<int> remap(pts.size(), -1);
  for (const auto& t : tris)
    for (int v : t) remap[v] = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (remap[i] < 0) continue;
    remap[i] = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(pts[i]);
    mesh.boundary.push_back(static_cast<int>(i) < b.nb() ? 1 : 0);
  }
  for (const auto& t : tris) mesh.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});

  const auto q = mesh_quality(mesh);
  if (q.min_angle_degrees < kMinAngleDegrees || q.min_area <= 0.0 || q.euler() != 1)
    throw Error(ErrorKind::MeshQualityFailure,
                "worst angle " + std::to_string(q.min_angle_degrees) + " deg, Euler " + std::to_string(q.euler()));
  return mesh;
}

Mesh map_mesh_radially(const Mesh& mesh, const StarDomain& from, const StarDomain& to) {
  Mesh out = mesh;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const Point& p = mesh.vertices[i];
    const double rho = p.norm();
    if (rho == 0.0) continue;
    const double t = std::atan2(p.y(), p.x());
    if (mesh.boundary[i]) {
      out.vertices[i] = to.boundary_point(t);
    } else {
      out.vertices[i] = p * (to.radius(t) / from.radius(t));
    }
  }
  const auto q = mesh_quality(out);
  if (q.min_angle_degrees < kMinAngleDegrees || q.min_area <= 0.0)
    throw Error(ErrorKind::MeshQualityFailure, "mapped mesh worst angle " + std::to_string(q.min_angle_degrees));
  return out;
}

Mesh structured_square_mesh(double side, int n, Point origin) {
  if (n < 1 || !(side > 0)) throw Error(ErrorKind::InvalidArgument, "bad square mesh parameters");
  Mesh mesh;
  mesh.h = side / n;
  // corner vertices plus cell centers (criss-cross)
  auto corner = [&](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.vertices.push_back(origin + Point(side * i / n, side * j / n));
      mesh.boundary.push_back(i == 0 || j == 0 || i == n || j == n);
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int c = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(origin + Point(side * (i + 0.5) / n, side * (j + 0.5) / n));
      mesh.boundary.push_back(0);
      const int a = corner(i, j), b = corner(i + 1, j), d = corner(i + 1, j + 1), e = corner(i, j + 1);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({b, d, c});
      mesh.triangles.push_back({d, e, c});
      mesh.triangles.push_back({e, a, c});
    }
  }
  return mesh;
}

std::vector<std::vector<int>> vertex_neighbors(const Mesh& mesh) {
  std::vector<std::vector<int>> nb(mesh.vertices.size());
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      nb[t[k]].push_back(t[(k + 1) % 3]);
      nb[t[k]].push_back(t[(k + 2) % 3]);
    }
  for (auto& v : nb) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return nb;
}

std::vector<std::vector<int>> vertex_triangles(const Mesh& mesh) {
  std::vector<std::vector<int>> vt(mesh.vertices.size());
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int v : mesh.triangles[t]) vt[v].push_back(t);
  return vt;
}

// ---------------------------------------------------------------------------

MeshLocator::MeshLocator(const Mesh& mesh) : mesh_(&mesh) {
  Eigen::AlignedBox<double, 2> box;
  for (const auto& p : mesh.vertices) box.extend(p);
  cell_ = std::max(mesh.h, 1e-9);
  lo_ = box.min() - Point(cell_, cell_);
  nx_ = static_cast<int>(box.sizes().x() / cell_) + 3;
  ny_ = static_cast<int>(box.sizes().y() / cell_) + 3;
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Eigen::AlignedBox<double, 2> tb;
    for (int v : mesh.triangles[t]) tb.extend(mesh.vertices[v]);
    int x0, y0, x1, y1;
    cell_of(tb.min().x(), tb.min().y(), x0, y0);
    cell_of(tb.max().x(), tb.max().y(), x1, y1);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) buckets_[static_cast<std::size_t>(y) * nx_ + x].push_back(t);
  }
}

int MeshLocator::cell_of(double x, double y, int& ix, int& iy) const {
  ix = std::clamp(static_cast<int>(std::floor((x - lo_.x()) / cell_)), 0, nx_ - 1);
  iy = std::clamp(static_cast<int>(std::floor((y - lo_.y()) / cell_)), 0, ny_ - 1);
  return iy * nx_ + ix;
}

Eigen::Vector3d MeshLocator::barycentric(int t, const Point& p) const {
  const auto& tri = mesh_->triangles[t];
  const Point &a = mesh_->vertices[tri[0]], &b = mesh_->vertices[tri[1]], &c = mesh_->vertices[tri[2]];
  const double area = signed_area(a, b, c);
  return {signed_area(p, b, c) / area, signed_area(a, p, c) / area, signed_area(a, b, p) / area};
}

std::optional<MeshLocator::Hit> MeshLocator::locate(const Point& p) const {
  int ix, iy;
  const int cell = cell_of(p.x(), p.y(), ix, iy);
  for (int t : buckets_[cell]) {
    const Eigen::Vector3d l = barycentric(t, p);
    if (l.minCoeff() >= -1e-12) return Hit{t, l};
  }
  return std::nullopt;
}

std::optional<MeshLocator::Hit> MeshLocator::locate_nearest(const Point& p, double reach) const {
  if (auto hit = locate(p)) return hit;
  int ix, iy;
  cell_of(p.x(), p.y(), ix, iy);
  const int span = static_cast<int>(std::ceil(reach / cell_));
  std::optional<Hit> best;
  double best_violation = std::numeric_limits<double>::infinity();
  for (int y = iy - span; y <= iy + span; ++y) {
    for (int x = ix - span; x <= ix + span; ++x) {
      if (x < 0 || y < 0 || x >= nx_ || y >= ny_) continue;
      for (int t : buckets_[static_cast<std::size_t>(y) * nx_ + x]) {
        const Eigen::Vector3d l = barycentric(t, p);
        const double violation = -l.minCoeff();
        if (violation < best_violation) {
          best_violation = violation;
          Eigen::Vector3d c = l.cwiseMax(0.0);
          c /= c.sum();
          best = Hit{t, c};
        }
      }
    }
  }
  if (best) {
    const auto& tri = mesh_->triangles[best->triangle];
    const Point q = best->barycentric[0] * mesh_->vertices[tri[0]] + best->barycentric[1] * mesh_->vertices[tri[1]] +
                    best->barycentric[2] * mesh_->vertices[tri[2]];
    if ((q - p).norm() > reach) return std::nullopt;
  }
  return best;
}

double MeshLocator::interpolate(std::span<const double> nodal, const Hit& hit) const {
  const auto& tri = mesh_->triangles[hit.triangle];
  return hit.barycentric[0] * nodal[tri[0]] + hit.barycentric[1] * nodal[tri[1]] + hit.barycentric[2] * nodal[tri[2]];
}

}  // namespace critshape
