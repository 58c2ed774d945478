#pragma once

namespace section_lab::oracles {

/// Chord length density of the unit square under IUR lines:
/// 1/2 on [0, 1] and 1/(z^2 sqrt(z^2 - 1)) - 1/2 on (1, sqrt 2].
/// Throws OutOfSupport outside [0, sqrt 2].
double square_chord_density(double z);

/// CDF of the IUR section area of a ball of radius r in R^3:
/// 1 - sqrt(1 - a / (pi r^2)). Throws OutOfSupport outside [0, pi r^2].
double ball_section_cdf(double a, double r = 1.0);

}  // namespace section_lab::oracles
