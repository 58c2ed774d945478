#include "section_lab/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <utility>

namespace section_lab::hull {

namespace {

double cross(const Point<2>& o, const Point<2>& a, const Point<2>& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

struct Face {
  std::array<int, 3> v;
  Point<3> normal;
  double offset;
  bool alive = true;
};

Face make_face(const PointSet<3>& p, int a, int b, int c) {
  Face f{{a, b, c}, Point<3>::Zero(), 0.0};
  f.normal = (p.col(b) - p.col(a)).cross(p.col(c) - p.col(a)).normalized();
  f.offset = f.normal.dot(p.col(a));
  return f;
}

}  // namespace

std::vector<int> convex_hull_2d(const PointSet<2>& points, double tol) {
  const int n = static_cast<int>(points.cols());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return points(0, i) < points(0, j) || (points(0, i) == points(0, j) && points(1, i) < points(1, j));
  });

  // Andrew's monotone chain; collinear points are dropped. Cross products
  // are compared against tol * |edge|, i.e. a distance threshold.
  std::vector<int> h(2 * static_cast<size_t>(n));
  int k = 0;
  auto turns_left = [&](int o, int a, int b) {
    const double len = (points.col(b) - points.col(o)).norm();
    return cross(points.col(o), points.col(a), points.col(b)) > tol * len;
  };
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && !turns_left(h[k - 2], h[k - 1], order[i])) --k;
    h[k++] = order[i];
  }
  for (int i = n - 2, t = k + 1; i >= 0; --i) {
    while (k >= t && !turns_left(h[k - 2], h[k - 1], order[i])) --k;
    h[k++] = order[i];
  }
  h.resize(std::max(k - 1, 0));
  if (h.size() < 3) {
    return {};
  }
  return h;
}

Hull3 convex_hull_3d(const PointSet<3>& p, double tol) {
  const int n = static_cast<int>(p.cols());
  if (n < 4) {
    throw Error(ErrorCode::DegenerateInput, "need at least 4 points for a 3D polytope");
  }

  // Initial simplex from extreme points.
  int i0 = 0;
  int i1 = 0;
  for (int i = 1; i < n; ++i) {
    if (p(0, i) < p(0, i0)) i0 = i;
    if (p(0, i) > p(0, i1)) i1 = i;
  }
  if ((p.col(i1) - p.col(i0)).norm() <= tol) {
    // all x equal; fall back to the farthest point from i0
    for (int i = 0; i < n; ++i) {
      if ((p.col(i) - p.col(i0)).norm() > (p.col(i1) - p.col(i0)).norm()) i1 = i;
    }
  }
  const Point<3> axis = (p.col(i1) - p.col(i0)).normalized();
  int i2 = -1;
  double best = tol;
  for (int i = 0; i < n; ++i) {
    const Point<3> d = p.col(i) - p.col(i0);
    const double dist = (d - d.dot(axis) * axis).norm();
    if (dist > best) {
      best = dist;
      i2 = i;
    }
  }
  if (i2 < 0) {
    throw Error(ErrorCode::DegenerateInput, "points are collinear");
  }
  const Point<3> plane_n = (p.col(i1) - p.col(i0)).cross(p.col(i2) - p.col(i0)).normalized();
  int i3 = -1;
  best = tol;
  for (int i = 0; i < n; ++i) {
    const double dist = std::abs(plane_n.dot(p.col(i) - p.col(i0)));
    if (dist > best) {
      best = dist;
      i3 = i;
    }
  }
  if (i3 < 0) {
    throw Error(ErrorCode::DegenerateInput, "points are coplanar");
  }

  std::vector<Face> faces;
  const Point<3> inside = (p.col(i0) + p.col(i1) + p.col(i2) + p.col(i3)) / 4.0;
  auto add_face = [&](int a, int b, int c) {
    Face f = make_face(p, a, b, c);
    if (f.normal.dot(inside) - f.offset > 0.0) {
      f = make_face(p, a, c, b);
    }
    faces.push_back(f);
  };
  add_face(i0, i1, i2);
  add_face(i0, i1, i3);
  add_face(i0, i2, i3);
  add_face(i1, i2, i3);

  std::vector<char> used(n, 0);
  used[i0] = used[i1] = used[i2] = used[i3] = 1;

  for (int q = 0; q < n; ++q) {
    if (used[q]) continue;
    const Point<3> x = p.col(q);
    std::vector<int> visible;
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
      if (faces[f].alive && faces[f].normal.dot(x) - faces[f].offset > tol) {
        visible.push_back(f);
      }
    }
    if (visible.empty()) continue;

    // Horizon: directed edges of visible faces whose twin is not visible.
    std::set<std::pair<int, int>> visible_edges;
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) visible_edges.emplace(v[e], v[(e + 1) % 3]);
    }
    std::vector<std::pair<int, int>> horizon;
    for (const auto& [a, b] : visible_edges) {
      if (!visible_edges.count({b, a})) horizon.emplace_back(a, b);
    }
    for (int f : visible) faces[f].alive = false;
    for (const auto& [a, b] : horizon) {
      faces.push_back(make_face(p, a, b, q));
    }
    used[q] = 1;
  }

  // Group triangles by supporting plane and rebuild each facet as a strict
  // 2D hull in its own plane, which drops edge-midpoints and face-interior
  // points that slipped in as triangle corners.
  std::vector<Face> alive;
  for (const auto& f : faces) {
    if (f.alive) alive.push_back(f);
  }
  std::vector<int> group(alive.size(), -1);
  std::vector<std::pair<Point<3>, double>> planes;
  for (size_t f = 0; f < alive.size(); ++f) {
    for (size_t g = 0; g < planes.size(); ++g) {
      if (alive[f].normal.dot(planes[g].first) > 1.0 - 1e-9 &&
          std::abs(alive[f].offset - planes[g].second) <= tol) {
        group[f] = static_cast<int>(g);
        break;
      }
    }
    if (group[f] < 0) {
      group[f] = static_cast<int>(planes.size());
      planes.emplace_back(alive[f].normal, alive[f].offset);
    }
  }

  Hull3 result;
  std::set<int> vertex_set;
  for (size_t g = 0; g < planes.size(); ++g) {
    std::set<int> members;
    for (size_t f = 0; f < alive.size(); ++f) {
      if (group[f] == static_cast<int>(g)) members.insert(alive[f].v.begin(), alive[f].v.end());
    }
    const Point<3> normal = planes[g].first;
    const Point<3> e1 = normal.unitOrthogonal();
    const Point<3> e2 = normal.cross(e1);
    std::vector<int> ids(members.begin(), members.end());
    PointSet<2> flat(2, static_cast<Eigen::Index>(ids.size()));
    for (size_t k = 0; k < ids.size(); ++k) {
      flat(0, k) = e1.dot(p.col(ids[k]));
      flat(1, k) = e2.dot(p.col(ids[k]));
    }
    // (e1, e2, normal) is right-handed, so CCW in-plane is CCW from outside.
    const std::vector<int> loop = convex_hull_2d(flat, tol);
    if (loop.size() < 3) continue;
    std::vector<int> facet;
    for (int k : loop) {
      facet.push_back(ids[k]);
      vertex_set.insert(ids[k]);
    }
    result.facets.push_back(std::move(facet));
  }
  result.vertices.assign(vertex_set.begin(), vertex_set.end());
  return result;
}

}  // namespace section_lab::hull
