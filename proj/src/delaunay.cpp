// Incremental Bowyer-Watson triangulation with walking point location.

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Geometry>

#include "critshape/error.hpp"
#include "critshape/mesh.hpp"

namespace critshape {

namespace {

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nb;  // nb[i] is across the edge opposite v[i]
  bool alive = true;
};

long double orient(const Point& a, const Point& b, const Point& c) {
  return static_cast<long double>(b.x() - a.x()) * (c.y() - a.y()) -
         static_cast<long double>(b.y() - a.y()) * (c.x() - a.x());
}

// > 0 iff d lies inside the circumcircle of the counterclockwise triangle abc
long double incircle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const long double adx = a.x() - d.x(), ady = a.y() - d.y();
  const long double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const long double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const long double ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

class BowyerWatson {
 public:
  explicit BowyerWatson(std::span<const Point> input) : pts_(input.begin(), input.end()) {
    Eigen::AlignedBox<double, 2> box;
    for (const auto& p : pts_) box.extend(p);
    const Point c = box.center();
    const double span = std::max(box.sizes().maxCoeff(), 1e-12);
    n_ = static_cast<int>(pts_.size());
    pts_.push_back(c + Point(-20 * span, -20 * span));
    pts_.push_back(c + Point(20 * span, -20 * span));
    pts_.push_back(c + Point(0.0, 20 * span));
    tris_.push_back({{n_, n_ + 1, n_ + 2}, {-1, -1, -1}, true});
  }

  void insert_all() {
    // spatially coherent insertion order keeps the walks short
    Eigen::AlignedBox<double, 2> box;
    for (int i = 0; i < n_; ++i) box.extend(pts_[i]);
    const int g = std::max(1, static_cast<int>(std::sqrt(n_ / 4.0)));
    const Point lo = box.min();
    const Point size = box.sizes().cwiseMax(1e-12);
    std::vector<int> order(n_);
    std::iota(order.begin(), order.end(), 0);
    auto key = [&](int i) {
      const int cy = std::min(g - 1, static_cast<int>((pts_[i].y() - lo.y()) / size.y() * g));
      int cx = std::min(g - 1, static_cast<int>((pts_[i].x() - lo.x()) / size.x() * g));
      if (cy % 2) cx = g - 1 - cx;
      return static_cast<long>(cy) * g + cx;
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
    for (int i : order) insert(i);
  }

  std::vector<Triangle> result() const {
    std::vector<Triangle> out;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= n_ || t.v[1] >= n_ || t.v[2] >= n_) continue;
      out.push_back(t.v);
    }
    return out;
  }

 private:
  int locate(const Point& p) {
    int t = last_;
    if (t < 0 || !tris_[t].alive) {
      t = static_cast<int>(tris_.size()) - 1;
      while (!tris_[t].alive) --t;
    }
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
      const Tri& tri = tris_[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int i = (k + rotate_) % 3;
        const Point& a = pts_[tri.v[(i + 1) % 3]];
        const Point& b = pts_[tri.v[(i + 2) % 3]];
        if (orient(a, b, p) < 0) {
          next = tri.nb[i];
          break;
        }
      }
      rotate_ = (rotate_ + 1) % 3;
      if (next < 0) return t;
      t = next;
    }
    // walking cycled on degenerate input; fall back to a scan
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
      if (!tris_[i].alive) continue;
      const auto& v = tris_[i].v;
      if (orient(pts_[v[0]], pts_[v[1]], p) >= 0 && orient(pts_[v[1]], pts_[v[2]], p) >= 0 &&
          orient(pts_[v[2]], pts_[v[0]], p) >= 0)
        return i;
    }
    throw Error(ErrorKind::MeshQualityFailure, "point location failed");
  }

  bool in_circle(int t, const Point& p) const {
    const auto& v = tris_[t].v;
    return incircle(pts_[v[0]], pts_[v[1]], pts_[v[2]], p) > 0;
  }

  void insert(int pi) {
    const Point& p = pts_[pi];
    const int start = locate(p);
    for (int k = 0; k < 3; ++k) {
      if ((pts_[tris_[start].v[k]] - p).squaredNorm() == 0.0) return;  // duplicate
    }
    std::vector<int> cavity{start};
    std::vector<int> stack{start};
    marks_.resize(tris_.size(), 0);
    ++epoch_;
    marks_[start] = epoch_;
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      for (int i = 0; i < 3; ++i) {
        const int nb = tris_[t].nb[i];
        if (nb < 0 || marks_[nb] == epoch_) continue;
        if (in_circle(nb, p)) {
          marks_[nb] = epoch_;
          cavity.push_back(nb);
          stack.push_back(nb);
        }
      }
    }
    struct Edge {
      int a, b, outer;
    };
    std::vector<Edge> rim;
    for (int t : cavity) {
      for (int i = 0; i < 3; ++i) {
        const int nb = tris_[t].nb[i];
        if (nb >= 0 && marks_[nb] == epoch_) continue;
        rim.push_back({tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3], nb});
      }
      tris_[t].alive = false;
    }
    // fan the cavity rim to the new point
    const int first = static_cast<int>(tris_.size());
    std::vector<std::pair<int, int>> by_start;  // (rim start vertex, new tri)
    by_start.reserve(rim.size());
    for (const auto& e : rim) {
      const int id = static_cast<int>(tris_.size());
      tris_.push_back({{e.a, e.b, pi}, {-1, -1, e.outer}, true});
      if (e.outer >= 0) {
        auto& o = tris_[e.outer];
        for (int i = 0; i < 3; ++i) {
          const int a = o.v[(i + 1) % 3], b = o.v[(i + 2) % 3];
          if (a == e.b && b == e.a) o.nb[i] = id;
        }
      }
      by_start.emplace_back(e.a, id);
    }
    std::sort(by_start.begin(), by_start.end());
    for (int id = first; id < static_cast<int>(tris_.size()); ++id) {
      const int b = tris_[id].v[1];
      const auto it = std::lower_bound(by_start.begin(), by_start.end(), std::make_pair(b, -1));
      if (it == by_start.end() || it->first != b) throw Error(ErrorKind::MeshQualityFailure, "broken cavity");
      tris_[id].nb[0] = it->second;
      tris_[it->second].nb[1] = id;
    }
    last_ = first;
  }

  std::vector<Point> pts_;
  int n_ = 0;
  std::vector<Tri> tris_;
  std::vector<int> marks_;
  int epoch_ = 0;
  int last_ = 0;
  int rotate_ = 0;
};

}  // namespace

std::vector<Triangle> delaunay(std::span<const Point> points) {
  if (points.size() < 3) return {};
  BowyerWatson bw(points);
  bw.insert_all();
  return bw.result();
}

}  // namespace critshape
