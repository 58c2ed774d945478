#include "section_lab/oracles.hpp"

#include <cmath>
#include <numbers>

#include "section_lab/error.hpp"

namespace section_lab::oracles {

double square_chord_density(double z) {
  if (!(z >= 0.0) || z > std::numbers::sqrt2) {
    throw Error(ErrorCode::OutOfSupport, "chord length outside [0, sqrt 2]");
  }
  if (z <= 1.0) {
    return 0.5;
  }
  return 1.0 / (z * z * std::sqrt(z * z - 1.0)) - 0.5;
}

double ball_section_cdf(double a, double r) {
  const double max_area = std::numbers::pi * r * r;
  if (!(a >= 0.0) || a > max_area) {
    throw Error(ErrorCode::OutOfSupport, "section area outside [0, pi r^2]");
  }
  return 1.0 - std::sqrt(1.0 - a / max_area);
}

}  // namespace section_lab::oracles
