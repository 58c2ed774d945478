#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "section_lab/error.hpp"

namespace section_lab {

template <int Dim>
using Point = Eigen::Matrix<double, Dim, 1>;

/// Column-major point cloud, one point per column.
template <int Dim>
using PointSet = Eigen::Matrix<double, Dim, Eigen::Dynamic>;

template <int Dim>
using Matrix = Eigen::Matrix<double, Dim, Dim>;

/// Unit vector on S^{Dim-1}. Construction normalizes the input.
template <int Dim>
class Direction {
 public:
  explicit Direction(const Point<Dim>& v) {
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::InputError, "direction must be a finite nonzero vector");
    }
    unit_ = v / norm;
  }

  const Point<Dim>& vector() const noexcept { return unit_; }
  double operator[](int i) const { return unit_[i]; }
  /// Exact negation, no renormalization.
  Direction operator-() const {
    Direction d = *this;
    d.unit_ = -unit_;
    return d;
  }

 private:
  Point<Dim> unit_;
};

/// The hyperplane {x : <x, direction> = offset}.
template <int Dim>
struct Hyperplane {
  Direction<Dim> direction;
  double offset = 0.0;
};

/// [a, b] = [min_{x in K} <x,theta>, max_{x in K} <x,theta>].
struct IntervalSupport {
  double a = 0.0;
  double b = 0.0;
  double width() const noexcept { return b - a; }
};

struct InnerSection {
  double max_volume = 0.0;
  double offset = 0.0;
};

struct MeanWidth {
  double value = 0.0;
  std::string scheme;
  long nodes = 0;
};

/// Convex polytope kept in vertex + facet form. Only obtainable through
/// build_polytope / polytope_from_halfspaces, so every instance is the
/// convex hull of its own vertex set.
///
/// Facets: in 2D each facet is an edge [i, j] listed counter-clockwise; in 3D
/// each facet is a vertex loop ordered counter-clockwise seen from outside.
template <int Dim>
class Polytope {
 public:
  static constexpr int dim = Dim;

  const PointSet<Dim>& vertices() const noexcept { return vertices_; }
  const std::vector<std::vector<int>>& facets() const noexcept { return facets_; }
  const std::vector<std::array<int, 2>>& edges() const noexcept { return edges_; }
  /// Outward unit normals, one column per facet, with facet_offsets() such
  /// that the body is {x : normal_f . x <= offset_f for all f}.
  const PointSet<Dim>& facet_normals() const noexcept { return normals_; }
  const Eigen::VectorXd& facet_offsets() const noexcept { return offsets_; }
  double diameter() const noexcept { return diameter_; }
  const std::string& label() const noexcept { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  Eigen::Index num_vertices() const noexcept { return vertices_.cols(); }

 private:
  template <int D>
  friend Polytope<D> build_polytope(const PointSet<D>& points, std::string label);
  template <int D>
  friend Polytope<D> transformed(const Polytope<D>& body, const Matrix<D>& linear,
                                 const Point<D>& shift);

  Polytope() = default;
  void finish();

  PointSet<Dim> vertices_;
  std::vector<std::vector<int>> facets_;
  std::vector<std::array<int, 2>> edges_;
  PointSet<Dim> normals_;
  Eigen::VectorXd offsets_;
  double diameter_ = 0.0;
  std::string label_;
};

template <int Dim>
struct Ball {
  static constexpr int dim = Dim;

  Ball(const Point<Dim>& center, double radius, std::string label = "ball")
      : center(center), radius(radius), label(std::move(label)) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
      throw Error(ErrorCode::InvalidBody, "ball radius must be positive");
    }
  }

  Point<Dim> center;
  double radius;
  std::string label;
};

using ConvexBody = std::variant<Polytope<2>, Polytope<3>, Ball<2>, Ball<3>>;

int dim(const ConvexBody& body);
const std::string& label(const ConvexBody& body);

// ---------------------------------------------------------------------------
// Construction

/// Convex hull of the given points. Points that are not extreme are dropped.
/// Throws DegenerateInput when the points do not span Dim dimensions.
template <int Dim>
Polytope<Dim> build_polytope(const PointSet<Dim>& points, std::string label = "polytope");

/// Vertex enumeration of {x : normals.col(i) . x <= offsets(i)} followed by
/// build_polytope. Throws DegenerateInput for unbounded or empty systems.
template <int Dim>
Polytope<Dim> polytope_from_halfspaces(const PointSet<Dim>& normals,
                                       const Eigen::VectorXd& offsets,
                                       std::string label = "polytope");

/// Image of the polytope under x -> linear * x + shift. The map must be
/// nonsingular.
template <int Dim>
Polytope<Dim> transformed(const Polytope<Dim>& body, const Matrix<Dim>& linear,
                          const Point<Dim>& shift);

enum class BuiltinShape { square, cube, dodecahedron, ball, regular_polygon };

struct BuiltinSpec {
  BuiltinShape shape = BuiltinShape::cube;
  int dim = 3;    // only consulted for balls
  int sides = 0;  // only consulted for regular polygons
};

/// Parses "square", "cube", "dodecahedron", "ball" (3D), "disk" (2D ball) and
/// "polygon<k>" / "polygon:<k>". Returns nullopt for anything else.
std::optional<BuiltinSpec> parse_builtin(const std::string& name);

/// Canonical centred bodies: unit square, unit cube, dodecahedron with unit
/// edge, unit ball, regular k-gon with unit circumradius. With
/// normalize_volume the body is rescaled to unit volume.
ConvexBody builtin_body(const BuiltinSpec& spec, bool normalize_volume);

// ---------------------------------------------------------------------------
// Exact geometric quantities

template <int Dim>
double volume(const Polytope<Dim>& body);

template <int Dim>
double volume(const Ball<Dim>& body) {
  const double r = body.radius;
  if constexpr (Dim == 2) {
    return std::numbers::pi * r * r;
  } else {
    return 4.0 / 3.0 * std::numbers::pi * r * r * r;
  }
}

double volume(const ConvexBody& body);

template <int Dim>
IntervalSupport support_interval(const Polytope<Dim>& body, const Direction<Dim>& theta);

template <int Dim>
IntervalSupport support_interval(const Ball<Dim>& body, const Direction<Dim>& theta) {
  const double c = body.center.dot(theta.vector());
  return {c - body.radius, c + body.radius};
}

/// (Dim-1)-volume of the intersection with the plane: chord length in 2D,
/// section area in 3D. Zero for empty or lower-dimensional intersections.
template <int Dim>
double section_volume(const Polytope<Dim>& body, const Hyperplane<Dim>& plane);

template <int Dim>
double section_volume(const Ball<Dim>& body, const Hyperplane<Dim>& plane) {
  const double t = plane.offset - body.center.dot(plane.direction.vector());
  const double r2 = body.radius * body.radius - t * t;
  if (r2 <= 0.0) {
    return 0.0;
  }
  if constexpr (Dim == 2) {
    return 2.0 * std::sqrt(r2);
  } else {
    return std::numbers::pi * r2;
  }
}

/// Maximal parallel section for the given normal and one maximizing offset.
/// Golden-section search on the Brunn-concave root of the section volume.
template <class Body>
InnerSection inner_section_function(const Body& body, const Direction<Body::dim>& theta);

/// Average width over the upper hemisphere by a deterministic midpoint rule.
/// 2D: `nodes` equispaced angles on [0, pi). 3D: equal-area grid in
/// (cos(omega), phi) with about `nodes` cells. Requires nodes >= 64.
template <class Body>
MeanWidth mean_width(const Body& body, long nodes);

MeanWidth mean_width(const ConvexBody& body, long nodes);

template <int Dim>
Point<Dim> centroid(const Polytope<Dim>& body) {
  return body.vertices().rowwise().mean();
}

template <int Dim>
Point<Dim> centroid(const Ball<Dim>& body) {
  return body.center;
}

/// Radius of the smallest ball centred at centroid(body) that contains it.
template <int Dim>
double enclosing_radius(const Polytope<Dim>& body) {
  return (body.vertices().colwise() - centroid(body)).colwise().norm().maxCoeff();
}

template <int Dim>
double enclosing_radius(const Ball<Dim>& body) {
  return body.radius;
}

template <int Dim>
Ball<Dim> transformed(const Ball<Dim>& body, const Matrix<Dim>& linear,
                      const Point<Dim>& shift) {
  // Only similarities keep a ball a ball; the scale factor is read off the
  // first column.
  return Ball<Dim>(linear * body.center + shift, body.radius * linear.col(0).norm(),
                   body.label);
}

template <class Body>
Body translated(const Body& body, const Point<Body::dim>& shift) {
  return transformed(body, Matrix<Body::dim>(Matrix<Body::dim>::Identity()), shift);
}

template <class Body>
Body scaled(const Body& body, double factor) {
  return transformed(body, Matrix<Body::dim>(factor * Matrix<Body::dim>::Identity()),
                     Point<Body::dim>(Point<Body::dim>::Zero()));
}

/// Moves the centroid to the origin.
template <class Body>
Body centered(const Body& body) {
  return translated(body, Point<Body::dim>(-centroid(body)));
}

// ---------------------------------------------------------------------------
// inline template definitions

template <class Body>
InnerSection inner_section_function(const Body& body, const Direction<Body::dim>& theta) {
  constexpr int n = Body::dim;
  const IntervalSupport support = support_interval(body, theta);
  auto root_section = [&](double s) {
    const double v = section_volume(body, Hyperplane<n>{theta, s});
    return n == 2 ? v : std::sqrt(v);
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double tol = 1e-10 * support.width();
  double lo = support.a;
  double hi = support.b;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = root_section(x1);
  double f2 = root_section(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = root_section(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = root_section(x1);
    }
  }
  const double s_star = 0.5 * (lo + hi);
  return {section_volume(body, Hyperplane<n>{theta, s_star}), s_star};
}

template <class Body>
MeanWidth mean_width(const Body& body, long nodes) {
  constexpr int n = Body::dim;
  if (nodes < 64) {
    throw Error(ErrorCode::InputError, "mean_width needs at least 64 quadrature nodes");
  }
  MeanWidth result;
  if constexpr (n == 2) {
    double sum = 0.0;
    for (long k = 0; k < nodes; ++k) {
      const double phi = (static_cast<double>(k) + 0.5) * std::numbers::pi / nodes;
      sum += support_interval(body, Direction<2>(Point<2>(std::cos(phi), std::sin(phi)))).width();
    }
    result.value = sum / static_cast<double>(nodes);
    result.scheme = "midpoint rule in angle on [0, pi)";
    result.nodes = nodes;
  } else {
    // dsigma = dz dphi on the sphere, so a midpoint grid in (z, phi) has
    // cells of equal area.
    const long nz = std::max<long>(8, std::lround(std::sqrt(nodes / 2.0)));
    const long nphi = 2 * nz;
    double sum = 0.0;
    for (long i = 0; i < nz; ++i) {
      const double z = (static_cast<double>(i) + 0.5) / nz;
      const double rho = std::sqrt(1.0 - z * z);
      for (long j = 0; j < nphi; ++j) {
        const double phi = (static_cast<double>(j) + 0.5) * 2.0 * std::numbers::pi / nphi;
        const Point<3> u(rho * std::cos(phi), rho * std::sin(phi), z);
        sum += support_interval(body, Direction<3>(u)).width();
      }
    }
    result.value = sum / static_cast<double>(nz * nphi);
    result.scheme = "equal-area midpoint grid in (cos omega, phi) on the upper hemisphere";
    result.nodes = nz * nphi;
  }
  return result;
}

}  // namespace section_lab
