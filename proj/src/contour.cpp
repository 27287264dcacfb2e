#include "critshape/contour.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <utility>

namespace critshape {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

// Chains segments given as pairs of node keys. Each node touches at most two
// segments; open chains start at nodes of degree one.
template <class Key>
std::vector<std::vector<Key>> chain(const std::vector<std::pair<Key, Key>>& segments, std::vector<char>& closed) {
  std::map<Key, std::vector<int>> incident;
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    incident[segments[s].first].push_back(s);
    incident[segments[s].second].push_back(s);
  }
  std::vector<char> used(segments.size(), 0);
  std::vector<std::vector<Key>> out;
  closed.clear();

  auto walk = [&](Key start, int first) {
    std::vector<Key> line{start};
    Key at = start;
    int s = first;
    while (s >= 0 && !used[s]) {
      used[s] = 1;
      at = segments[s].first == at ? segments[s].second : segments[s].first;
      line.push_back(at);
      int next = -1;
      for (int t : incident[at])
        if (!used[t]) next = t;
      s = next;
    }
    const bool loop = line.size() > 2 && line.front() == line.back();
    if (loop) line.pop_back();
    out.push_back(std::move(line));
    closed.push_back(loop);
  };

  // open chains first, from their lowest free end, then loops
  for (const auto& [key, segs] : incident)
    if (segs.size() == 1 && !used[segs[0]]) walk(key, segs[0]);
  for (int s = 0; s < static_cast<int>(segments.size()); ++s)
    if (!used[s]) walk(segments[s].first, s);
  return out;
}

}  // namespace

std::vector<Polyline> contour_lines(const Mesh& mesh, std::span<const double> values, double level) {
  std::vector<std::pair<EdgeKey, EdgeKey>> segments;
  for (const auto& t : mesh.triangles) {
    EdgeKey hits[3];
    int n = 0;
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      // vertices on the level count as above it, so every crossing is strict
      const bool sa = values[a] >= level, sb = values[b] >= level;
      if (sa != sb) hits[n++] = edge_key(a, b);
    }
    if (n == 2) segments.emplace_back(hits[0], hits[1]);
  }
  std::vector<char> closed;
  const auto chains = chain(segments, closed);

  std::vector<Polyline> lines;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    Polyline pl;
    pl.closed = closed[c];
    for (const auto& [a, b] : chains[c]) {
      const double s = (level - values[a]) / (values[b] - values[a]);
      pl.points.push_back(mesh.vertices[a] + s * (mesh.vertices[b] - mesh.vertices[a]));
    }
    lines.push_back(std::move(pl));
  }
  return lines;
}

std::vector<Polyline> mesh_boundary(const Mesh& mesh) {
  std::map<EdgeKey, int> count;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) ++count[edge_key(t[e], t[(e + 1) % 3])];
  // keep the counterclockwise orientation of the owning triangle
  std::vector<std::pair<int, int>> segments;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e)
      if (count[edge_key(t[e], t[(e + 1) % 3])] == 1) segments.emplace_back(t[e], t[(e + 1) % 3]);
  std::vector<char> closed;
  const auto chains = chain(segments, closed);

  std::vector<Polyline> loops;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    Polyline pl;
    pl.closed = closed[c];
    for (int v : chains[c]) pl.points.push_back(mesh.vertices[v]);
    loops.push_back(std::move(pl));
  }
  return loops;
}

std::vector<double> default_levels(std::span<const double> values, int count) {
  double top = 0.0;
  for (double v : values) top = std::max(top, v);
  std::vector<double> levels;
  for (int k = 1; k <= count; ++k) levels.push_back(top * k / (count + 1));
  return levels;
}

void write_contour_csv(std::ostream& out, const Mesh& mesh, std::span<const double> values,
                       std::span<const double> levels) {
  const auto old = out.precision(12);
  out << "kind,level,polyline,x,y\n";
  int id = 0;
  auto emit = [&](const char* kind, double level, const Polyline& pl) {
    for (const auto& p : pl.points) out << kind << ',' << level << ',' << id << ',' << p.x() << ',' << p.y() << '\n';
    if (pl.closed && !pl.points.empty())
      out << kind << ',' << level << ',' << id << ',' << pl.points[0].x() << ',' << pl.points[0].y() << '\n';
    ++id;
  };
  for (const auto& pl : mesh_boundary(mesh)) emit("boundary", 0.0, pl);
  for (double level : levels)
    for (const auto& pl : contour_lines(mesh, values, level)) emit("contour", level, pl);
  out.precision(old);
}

}  // namespace critshape
