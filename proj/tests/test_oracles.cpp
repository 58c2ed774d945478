#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

#include "section_lab/error.hpp"
#include "section_lab/oracles.hpp"

using namespace section_lab;

TEST_CASE("square chord density values") {
  CHECK(oracles::square_chord_density(0.5) == 0.5);
  CHECK(oracles::square_chord_density(1.0) == 0.5);
  CHECK(std::abs(oracles::square_chord_density(std::numbers::sqrt2)) < 1e-12);
  CHECK(oracles::square_chord_density(1.2) == doctest::Approx(1.0 / (1.44 * std::sqrt(0.44)) - 0.5));
  CHECK(oracles::square_chord_density(1.2) == doctest::Approx(0.54691).epsilon(1e-5));
  CHECK_THROWS_AS(oracles::square_chord_density(-0.1), Error);
  CHECK_THROWS_AS(oracles::square_chord_density(1.5), Error);
}

TEST_CASE("square chord density integrates to one") {
  boost::math::quadrature::tanh_sinh<double> q;
  // z = sqrt(1 + t^2) on the second branch removes the 1/sqrt(z - 1)
  // singularity. Below t0 the double z can no longer resolve z - 1, so that
  // sliver is added in closed form.
  const double t0 = 1e-4;
  auto integral = [&](auto weight, double sliver) {
    const auto first = [&](double z) { return weight(z) * oracles::square_chord_density(z); };
    const auto second = [&](double t) {
      const double z = std::sqrt(1.0 + t * t);
      return weight(z) * oracles::square_chord_density(z) * t / z;
    };
    return q.integrate(first, 0.0, 1.0) + sliver + q.integrate(second, t0, 1.0);
  };
  const double z0 = std::sqrt(1.0 + t0 * t0);
  CHECK(std::abs(integral([](double) { return 1.0; }, t0 / z0 - 0.5 * (z0 - 1.0)) - 1.0) < 1e-9);
  // mean chord length pi A / perimeter
  CHECK(std::abs(integral([](double z) { return z; }, std::atan(t0) - 0.25 * t0 * t0) - std::numbers::pi / 4.0) <
        1e-9);
}

TEST_CASE("ball section law") {
  const double pi = std::numbers::pi;
  CHECK(oracles::ball_section_cdf(0.0) == 0.0);
  CHECK(oracles::ball_section_cdf(pi) == 1.0);
  CHECK(oracles::ball_section_cdf(3.0 * pi / 4.0) == doctest::Approx(0.5));
  CHECK(oracles::ball_section_cdf(4.0 * 3.0 * pi / 4.0, 2.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(oracles::ball_section_cdf(-1.0), Error);
  CHECK_THROWS_AS(oracles::ball_section_cdf(4.0), Error);
  double prev = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double f = oracles::ball_section_cdf(pi * i / 1000.0);
    CHECK(f >= prev);
    prev = f;
  }
  // on the root scale the CDF z -> F(z^2) is convex
  auto root_cdf = [](double z) { return oracles::ball_section_cdf(z * z); };
  const double dz = 1e-3;
  for (double z = dz; z < 1.7; z += 0.01) {
    CHECK(root_cdf(z + dz) - 2.0 * root_cdf(z) + root_cdf(z - dz) >= -1e-15);
  }
}
