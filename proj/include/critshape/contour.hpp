#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "critshape/mesh.hpp"

namespace critshape {

struct Polyline {
  std::vector<Point> points;
  bool closed = false;
};

// Level set {u = level} of a P1 field by marching triangles; crossing points
// are shared between neighbouring triangles so the segments chain into
// polylines.
std::vector<Polyline> contour_lines(const Mesh& mesh, std::span<const double> values, double level);

// Boundary edges of the mesh chained into closed loops.
std::vector<Polyline> mesh_boundary(const Mesh& mesh);

// `count` levels evenly spaced strictly between 0 and max(values).
std::vector<double> default_levels(std::span<const double> values, int count);

// CSV with header kind,level,polyline,x,y. Boundary rows have kind
// "boundary" and level 0; polyline ids are global across the file. Closed
// polylines repeat their first point at the end.
void write_contour_csv(std::ostream& out, const Mesh& mesh, std::span<const double> values,
                       std::span<const double> levels);

}  // namespace critshape
