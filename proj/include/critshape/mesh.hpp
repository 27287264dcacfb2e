#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "critshape/geometry.hpp"

namespace critshape {

using Triangle = std::array<int, 3>;

// Unstructured triangulation of a disk-type region. Triangles are
// counterclockwise; `boundary[i]` marks vertices on the domain boundary.
struct Mesh {
  std::vector<Point> vertices;
  std::vector<Triangle> triangles;
  std::vector<char> boundary;
  double h = 0.0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  double area(int t) const;
};

inline constexpr double kMinAngleDegrees = 20.0;

struct MeshQuality {
  double min_angle_degrees = 0.0;
  double min_area = 0.0;
  int vertices = 0;
  int edges = 0;
  int triangles = 0;
  int euler() const { return vertices - edges + triangles; }
};

MeshQuality mesh_quality(const Mesh& mesh);

// Conforming Delaunay triangulation of a star domain with target edge
// length h: arc-length boundary sampling at spacing <= h, hexagonal interior
// seeding, Laplacian smoothing and circumcenter refinement until every angle
// is at least 20 degrees. Throws MeshQualityFailure otherwise.
Mesh triangulate(const StarDomain& domain, double h);

// Moves every vertex along its ray from the origin so that the boundary of
// `from` lands on the boundary of `to`; connectivity is unchanged.
Mesh map_mesh_radially(const Mesh& mesh, const StarDomain& from, const StarDomain& to);

// Criss-cross structured mesh of the square [x0, x0 + side] x [y0, y0 + side]
// with n cells per side.
Mesh structured_square_mesh(double side, int n, Point origin = Point::Zero());

// Delaunay triangulation of a point set (Bowyer-Watson); returns
// counterclockwise triangles over the convex hull.
std::vector<Triangle> delaunay(std::span<const Point> points);

// Vertex-to-vertex adjacency (sorted, no self).
std::vector<std::vector<int>> vertex_neighbors(const Mesh& mesh);
// Vertex-to-triangle incidence.
std::vector<std::vector<int>> vertex_triangles(const Mesh& mesh);

// Point location over a uniform bucket grid.
class MeshLocator {
 public:
  explicit MeshLocator(const Mesh& mesh);

  struct Hit {
    int triangle = -1;
    Eigen::Vector3d barycentric;
  };

  // Triangle containing p (with a small tolerance), if any.
  std::optional<Hit> locate(const Point& p) const;
  // Like locate, but falls back to the nearest triangle within `reach` and
  // clamps the barycentric coordinates.
  std::optional<Hit> locate_nearest(const Point& p, double reach) const;

  double interpolate(std::span<const double> nodal, const Hit& hit) const;

 private:
  Eigen::Vector3d barycentric(int t, const Point& p) const;
  int cell_of(double x, double y, int& ix, int& iy) const;

  const Mesh* mesh_;
  Point lo_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace critshape
