#include "section_lab/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "section_lab/hull.hpp"

namespace section_lab {

namespace {

constexpr double kHullTolerance = 1e-10;     // relative to the point-cloud extent
constexpr double kSectionTolerance = 1e-12;  // relative to the body diameter

template <int Dim>
double extent(const PointSet<Dim>& points) {
  return (points.rowwise().maxCoeff() - points.rowwise().minCoeff()).norm();
}

/// Counter-clockwise angular order of in-plane points around their mean.
template <class Coords>
void sort_angular(std::vector<Coords>& pts) {
  double cx = 0.0;
  double cy = 0.0;
  for (const auto& q : pts) {
    cx += q[0];
    cy += q[1];
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  for (auto& q : pts) q[2] = std::atan2(q[1] - cy, q[0] - cx);
  std::sort(pts.begin(), pts.end(), [](const Coords& l, const Coords& r) { return l[2] < r[2]; });
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::InvalidBody: return "InvalidBody";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NonPositiveBandwidth: return "NonPositiveBandwidth";
    case ErrorCode::ZeroGridPoint: return "ZeroGridPoint";
    case ErrorCode::InfiniteMean: return "InfiniteMean";
    case ErrorCode::ZeroLocation: return "ZeroLocation";
    case ErrorCode::AllZeroLikelihood: return "AllZeroLikelihood";
    case ErrorCode::OutOfSupport: return "OutOfSupport";
    case ErrorCode::InputError: return "InputError";
  }
  return "Unknown";
}

int dim(const ConvexBody& body) {
  return std::visit([](const auto& b) { return std::decay_t<decltype(b)>::dim; }, body);
}

const std::string& label(const ConvexBody& body) {
  return std::visit(
      [](const auto& b) -> const std::string& {
        if constexpr (requires { b.label(); }) {
          return b.label();
        } else {
          return b.label;
        }
      },
      body);
}

template <int Dim>
void Polytope<Dim>::finish() {
  const auto nf = static_cast<Eigen::Index>(facets_.size());
  normals_.resize(Dim, nf);
  offsets_.resize(nf);
  std::set<std::array<int, 2>> edge_set;
  for (Eigen::Index f = 0; f < nf; ++f) {
    const auto& loop = facets_[f];
    Point<Dim> normal;
    if constexpr (Dim == 2) {
      const Point<2> d = vertices_.col(loop[1]) - vertices_.col(loop[0]);
      normal = Point<2>(d.y(), -d.x());
    } else {
      // Newell's method
      normal.setZero();
      for (size_t k = 0; k < loop.size(); ++k) {
        const Point<3> a = vertices_.col(loop[k]);
        const Point<3> b = vertices_.col(loop[(k + 1) % loop.size()]);
        normal += a.cross(b);
      }
    }
    normal.normalize();
    normals_.col(f) = normal;
    offsets_(f) = normal.dot(vertices_.col(loop[0]));
    for (size_t k = 0; k < loop.size(); ++k) {
      if constexpr (Dim == 2) {
        if (k == 1) break;
      }
      int a = loop[k];
      int b = loop[(k + 1) % loop.size()];
      edge_set.insert({std::min(a, b), std::max(a, b)});
    }
  }
  edges_.assign(edge_set.begin(), edge_set.end());

  diameter_ = 0.0;
  for (Eigen::Index i = 0; i < vertices_.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < vertices_.cols(); ++j) {
      diameter_ = std::max(diameter_, (vertices_.col(i) - vertices_.col(j)).norm());
    }
  }
}

template <int Dim>
Polytope<Dim> build_polytope(const PointSet<Dim>& points, std::string label) {
  if (points.cols() < Dim + 1) {
    throw Error(ErrorCode::DegenerateInput, "need at least dim+1 points");
  }
  if (!points.allFinite()) {
    throw Error(ErrorCode::DegenerateInput, "points must be finite");
  }
  const double tol = kHullTolerance * std::max(extent(points), 1e-300);
  Polytope<Dim> body;
  body.label_ = std::move(label);

  if constexpr (Dim == 2) {
    const std::vector<int> loop = hull::convex_hull_2d(points, tol);
    if (loop.empty()) {
      throw Error(ErrorCode::DegenerateInput, "points are collinear");
    }
    const auto nv = static_cast<Eigen::Index>(loop.size());
    body.vertices_.resize(2, nv);
    for (Eigen::Index k = 0; k < nv; ++k) {
      body.vertices_.col(k) = points.col(loop[k]);
      body.facets_.push_back({static_cast<int>(k), static_cast<int>((k + 1) % nv)});
    }
  } else {
    const hull::Hull3 h = hull::convex_hull_3d(points, tol);
    std::map<int, int> remap;
    body.vertices_.resize(3, static_cast<Eigen::Index>(h.vertices.size()));
    for (size_t k = 0; k < h.vertices.size(); ++k) {
      remap[h.vertices[k]] = static_cast<int>(k);
      body.vertices_.col(static_cast<Eigen::Index>(k)) = points.col(h.vertices[k]);
    }
    for (const auto& facet : h.facets) {
      std::vector<int> loop;
      for (int v : facet) loop.push_back(remap.at(v));
      body.facets_.push_back(std::move(loop));
    }
  }
  body.finish();
  return body;
}

template <int Dim>
Polytope<Dim> polytope_from_halfspaces(const PointSet<Dim>& normals,
                                       const Eigen::VectorXd& offsets, std::string label) {
  const Eigen::Index m = normals.cols();
  if (offsets.size() != m || m < Dim + 1) {
    throw Error(ErrorCode::DegenerateInput, "need at least dim+1 half-spaces with one offset each");
  }
  PointSet<Dim> unit(Dim, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double len = normals.col(i).norm();
    if (!(len > 0.0)) {
      throw Error(ErrorCode::DegenerateInput, "half-space normal must be nonzero");
    }
    unit.col(i) = normals.col(i) / len;
    rhs(i) = offsets(i) / len;
  }
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  const double feasibility_tol = 1e-9 * scale;

  std::vector<Point<Dim>> found;
  std::array<Eigen::Index, Dim> idx{};
  auto try_subset = [&]() {
    Matrix<Dim> a;
    Point<Dim> b;
    for (int r = 0; r < Dim; ++r) {
      a.row(r) = unit.col(idx[r]).transpose();
      b(r) = rhs(idx[r]);
    }
    if (std::abs(a.determinant()) < 1e-12) return;
    const Point<Dim> x = a.partialPivLu().solve(b);
    if (((unit.transpose() * x - rhs).array() <= feasibility_tol).all()) {
      found.push_back(x);
    }
  };
  if constexpr (Dim == 2) {
    for (idx[0] = 0; idx[0] < m; ++idx[0])
      for (idx[1] = idx[0] + 1; idx[1] < m; ++idx[1]) try_subset();
  } else {
    for (idx[0] = 0; idx[0] < m; ++idx[0])
      for (idx[1] = idx[0] + 1; idx[1] < m; ++idx[1])
        for (idx[2] = idx[1] + 1; idx[2] < m; ++idx[2]) try_subset();
  }
  if (found.size() < static_cast<size_t>(Dim + 1)) {
    throw Error(ErrorCode::DegenerateInput, "half-space system is empty, unbounded or flat");
  }
  PointSet<Dim> pts(Dim, static_cast<Eigen::Index>(found.size()));
  for (size_t k = 0; k < found.size(); ++k) pts.col(static_cast<Eigen::Index>(k)) = found[k];
  Polytope<Dim> body = build_polytope<Dim>(pts, std::move(label));

  // Bounded iff every hull facet lies on one of the input constraints.
  for (Eigen::Index f = 0; f < body.facet_normals().cols(); ++f) {
    bool supported = false;
    for (Eigen::Index i = 0; i < m && !supported; ++i) {
      supported = body.facet_normals().col(f).dot(unit.col(i)) > 1.0 - 1e-9 &&
                  std::abs(body.facet_offsets()(f) - rhs(i)) <= feasibility_tol * 10.0;
    }
    if (!supported) {
      throw Error(ErrorCode::DegenerateInput, "half-space system is unbounded");
    }
  }
  return body;
}

template <int Dim>
Polytope<Dim> transformed(const Polytope<Dim>& body, const Matrix<Dim>& linear,
                          const Point<Dim>& shift) {
  const double det = linear.determinant();
  if (!(std::abs(det) > 0.0)) {
    throw Error(ErrorCode::InputError, "transformation must be nonsingular");
  }
  Polytope<Dim> out;
  out.label_ = body.label_;
  out.vertices_ = (linear * body.vertices_).colwise() + shift;
  out.facets_ = body.facets_;
  if (det < 0.0) {
    if constexpr (Dim == 2) {
      // reverse the vertex cycle and rebuild edges [k, k+1]
      const auto nv = out.vertices_.cols();
      PointSet<2> reversed(2, nv);
      for (Eigen::Index k = 0; k < nv; ++k) reversed.col(k) = out.vertices_.col(nv - 1 - k);
      out.vertices_ = reversed;
    } else {
      for (auto& loop : out.facets_) std::reverse(loop.begin(), loop.end());
    }
  }
  out.finish();
  return out;
}

template <int Dim>
double volume(const Polytope<Dim>& body) {
  const auto& v = body.vertices();
  if constexpr (Dim == 2) {
    double twice = 0.0;
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
      const Eigen::Index next = (k + 1) % v.cols();
      twice += v(0, k) * v(1, next) - v(0, next) * v(1, k);
    }
    return 0.5 * std::abs(twice);
  } else {
    const Point<3> c = centroid(body);
    double six = 0.0;
    for (const auto& loop : body.facets()) {
      const Point<3> a = v.col(loop[0]) - c;
      for (size_t k = 1; k + 1 < loop.size(); ++k) {
        six += a.dot((v.col(loop[k]) - c).cross(v.col(loop[k + 1]) - c));
      }
    }
    return six / 6.0;
  }
}

double volume(const ConvexBody& body) {
  return std::visit([](const auto& b) { return volume(b); }, body);
}

MeanWidth mean_width(const ConvexBody& body, long nodes) {
  return std::visit([nodes](const auto& b) { return mean_width(b, nodes); }, body);
}

template <int Dim>
IntervalSupport support_interval(const Polytope<Dim>& body, const Direction<Dim>& theta) {
  const Eigen::RowVectorXd h = theta.vector().transpose() * body.vertices();
  return {h.minCoeff(), h.maxCoeff()};
}

template <int Dim>
double section_volume(const Polytope<Dim>& body, const Hyperplane<Dim>& plane) {
  const auto& v = body.vertices();
  const Point<Dim>& theta = plane.direction.vector();
  const double eps = kSectionTolerance * body.diameter();
  const Eigen::Index nv = v.cols();

  // Signed distances of the vertices to the plane.
  thread_local std::vector<double> dist;
  dist.resize(static_cast<size_t>(nv));
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = -dmin;
  for (Eigen::Index i = 0; i < nv; ++i) {
    const double d = v.col(i).dot(theta) - plane.offset;
    dist[i] = d;
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (dmax < -eps || dmin > eps) {
    return 0.0;
  }

  auto crossing = [&](const std::array<int, 2>& e) -> std::optional<Point<Dim>> {
    const double da = dist[e[0]];
    const double db = dist[e[1]];
    if ((da > eps && db < -eps) || (da < -eps && db > eps)) {
      const double t = da / (da - db);
      return Point<Dim>(v.col(e[0]) + t * (v.col(e[1]) - v.col(e[0])));
    }
    return std::nullopt;
  };

  if constexpr (Dim == 2) {
    const Point<2> along(-theta.y(), theta.x());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    auto take = [&](const Point<2>& q) {
      const double t = q.dot(along);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    };
    for (Eigen::Index i = 0; i < nv; ++i) {
      if (std::abs(dist[i]) <= eps) take(v.col(i));
    }
    for (const auto& e : body.edges()) {
      if (auto q = crossing(e)) take(*q);
    }
    return hi > lo ? hi - lo : 0.0;
  } else {
    const Point<3> e1 = theta.unitOrthogonal();
    const Point<3> e2 = theta.cross(e1);
    thread_local std::vector<std::array<double, 3>> pts;
    pts.clear();
    auto take = [&](const Point<3>& q) { pts.push_back({q.dot(e1), q.dot(e2), 0.0}); };
    for (Eigen::Index i = 0; i < nv; ++i) {
      if (std::abs(dist[i]) <= eps) take(v.col(i));
    }
    for (const auto& e : body.edges()) {
      if (auto q = crossing(e)) take(*q);
    }
    if (pts.size() < 3) {
      return 0.0;
    }
    sort_angular(pts);
    // Fan from the first point; absolute coordinates would cancel badly for
    // small sections far from the origin.
    double twice = 0.0;
    const auto& o = pts[0];
    for (size_t k = 1; k + 1 < pts.size(); ++k) {
      const double ax = pts[k][0] - o[0];
      const double ay = pts[k][1] - o[1];
      const double bx = pts[k + 1][0] - o[0];
      const double by = pts[k + 1][1] - o[1];
      twice += ax * by - bx * ay;
    }
    return 0.5 * std::abs(twice);
  }
}

std::optional<BuiltinSpec> parse_builtin(const std::string& raw) {
  std::string name;
  for (char c : raw) name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (name == "square") return BuiltinSpec{BuiltinShape::square, 2, 0};
  if (name == "cube") return BuiltinSpec{BuiltinShape::cube, 3, 0};
  if (name == "dodecahedron") return BuiltinSpec{BuiltinShape::dodecahedron, 3, 0};
  if (name == "ball" || name == "ball3") return BuiltinSpec{BuiltinShape::ball, 3, 0};
  if (name == "disk" || name == "ball2") return BuiltinSpec{BuiltinShape::ball, 2, 0};
  const std::string prefix = "polygon";
  if (name.rfind(prefix, 0) == 0) {
    std::string rest = name.substr(prefix.size());
    if (!rest.empty() && rest.front() == ':') rest.erase(0, 1);
    if (rest.empty() || !std::all_of(rest.begin(), rest.end(), ::isdigit)) return std::nullopt;
    const int k = std::stoi(rest);
    if (k < 3) return std::nullopt;
    return BuiltinSpec{BuiltinShape::regular_polygon, 2, k};
  }
  return std::nullopt;
}

ConvexBody builtin_body(const BuiltinSpec& spec, bool normalize_volume) {
  ConvexBody body = [&]() -> ConvexBody {
    switch (spec.shape) {
      case BuiltinShape::square: {
        PointSet<2> p(2, 4);
        p << -0.5, 0.5, 0.5, -0.5,
             -0.5, -0.5, 0.5, 0.5;
        return build_polytope<2>(p, "square");
      }
      case BuiltinShape::cube: {
        PointSet<3> p(3, 8);
        for (int i = 0; i < 8; ++i) {
          p.col(i) << ((i & 1) ? 0.5 : -0.5), ((i & 2) ? 0.5 : -0.5), ((i & 4) ? 0.5 : -0.5);
        }
        return build_polytope<3>(p, "cube");
      }
      case BuiltinShape::dodecahedron: {
        const double phi = std::numbers::phi;
        const double inv = 1.0 / phi;
        PointSet<3> p(3, 20);
        int k = 0;
        for (int i = 0; i < 8; ++i) {
          p.col(k++) << ((i & 1) ? 1 : -1), ((i & 2) ? 1 : -1), ((i & 4) ? 1 : -1);
        }
        for (int i = 0; i < 4; ++i) {
          const double a = (i & 1) ? inv : -inv;
          const double b = (i & 2) ? phi : -phi;
          p.col(k++) << 0.0, a, b;
          p.col(k++) << a, b, 0.0;
          p.col(k++) << b, 0.0, a;
        }
        // edge length is 2/phi for these coordinates
        p *= phi / 2.0;
        return build_polytope<3>(p, "dodecahedron");
      }
      case BuiltinShape::ball:
        if (spec.dim == 2) return Ball<2>(Point<2>::Zero(), 1.0, "disk");
        return Ball<3>(Point<3>::Zero(), 1.0, "ball");
      case BuiltinShape::regular_polygon: {
        if (spec.sides < 3) {
          throw Error(ErrorCode::InputError, "regular polygon needs at least 3 sides");
        }
        PointSet<2> p(2, spec.sides);
        for (int j = 0; j < spec.sides; ++j) {
          const double a = 2.0 * std::numbers::pi * j / spec.sides;
          p.col(j) << std::cos(a), std::sin(a);
        }
        return build_polytope<2>(p, "polygon" + std::to_string(spec.sides));
      }
    }
    throw Error(ErrorCode::InputError, "unknown builtin shape");
  }();

  if (normalize_volume) {
    const double n = static_cast<double>(dim(body));
    const double factor = std::pow(volume(body), -1.0 / n);
    body = std::visit([factor](const auto& b) -> ConvexBody { return scaled(b, factor); }, body);
  }
  return body;
}

template Polytope<2> build_polytope<2>(const PointSet<2>&, std::string);
template Polytope<3> build_polytope<3>(const PointSet<3>&, std::string);
template Polytope<2> polytope_from_halfspaces<2>(const PointSet<2>&, const Eigen::VectorXd&, std::string);
template Polytope<3> polytope_from_halfspaces<3>(const PointSet<3>&, const Eigen::VectorXd&, std::string);
template Polytope<2> transformed<2>(const Polytope<2>&, const Matrix<2>&, const Point<2>&);
template Polytope<3> transformed<3>(const Polytope<3>&, const Matrix<3>&, const Point<3>&);
template double volume<2>(const Polytope<2>&);
template double volume<3>(const Polytope<3>&);
template IntervalSupport support_interval<2>(const Polytope<2>&, const Direction<2>&);
template IntervalSupport support_interval<3>(const Polytope<3>&, const Direction<3>&);
template double section_volume<2>(const Polytope<2>&, const Hyperplane<2>&);
template double section_volume<3>(const Polytope<3>&, const Hyperplane<3>&);

}  // namespace section_lab
