#pragma once

#include <vector>

#include "section_lab/geometry.hpp"

namespace section_lab::hull {

/// Hull vertices of a planar point set, counter-clockwise, without collinear
/// points. Indices refer to columns of the input. Empty when the points are
/// collinear within `tol`.
std::vector<int> convex_hull_2d(const PointSet<2>& points, double tol);

struct Hull3 {
  std::vector<int> vertices;
  /// Polygonal facets (coplanar triangles merged), each counter-clockwise as
  /// seen from outside. Indices refer to columns of the input.
  std::vector<std::vector<int>> facets;
};

/// Incremental 3D hull. Throws DegenerateInput for coplanar input.
Hull3 convex_hull_3d(const PointSet<3>& points, double tol);

}  // namespace section_lab::hull
