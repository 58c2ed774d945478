#include <doctest.h>

#include <cmath>
#include <numbers>

#include "section_lab/density.hpp"
#include "section_lab/oracles.hpp"
#include "section_lab/sampler.hpp"
#include "section_lab/validation.hpp"

using namespace section_lab;

namespace {

const Polytope<3>& cube() {
  static const auto c = std::get<Polytope<3>>(builtin_body({BuiltinShape::cube, 3, 0}, false));
  return c;
}
const Polytope<2>& square() {
  static const auto s = std::get<Polytope<2>>(builtin_body({BuiltinShape::square, 2, 0}, false));
  return s;
}

// Integral of the unit-square chord density.
double square_chord_cdf(double z) {
  if (z <= 1.0) return 0.5 * z;
  return 0.5 + std::sqrt(z * z - 1.0) / z - 0.5 * (z - 1.0);
}

}  // namespace

TEST_CASE("identical seeds give identical samples") {
  const auto a = sample_iur_sections(cube(), 20000, RngStream(5, 0));
  const auto b = sample_iur_sections(cube(), 20000, RngStream(5, 0));
  CHECK(a.values == b.values);
  CHECK(a.n_proposed == b.n_proposed);
  const auto c = sample_iur_sections(cube(), 20000, RngStream(6, 0));
  CHECK(a.values != c.values);
}

TEST_CASE("output does not depend on the worker count") {
  SamplerOptions one{1, 1000};
  SamplerOptions four{4, 1000};
  const auto a = sample_iur_sections(cube(), 12345, RngStream(2, 0), one);
  const auto b = sample_iur_sections(cube(), 12345, RngStream(2, 0), four);
  CHECK(a.values == b.values);
  CHECK(a.n_proposed == b.n_proposed);
  CHECK(a.values.size() == 12345);
  CHECK(a.n_accepted == 12345);
}

TEST_CASE("bookkeeping") {
  const auto s = sample_iur_sections(cube(), 1000, RngStream(1, 0));
  CHECK(s.dim == 3);
  CHECK(s.seed == 1);
  CHECK(s.body_label == "cube");
  CHECK(s.n_proposed >= s.n_accepted);
  const auto ball = sample_iur_sections(Ball<3>(Point<3>(1, 1, 1), 1.0), 1000, RngStream(1, 0));
  CHECK(acceptance_estimate(ball) == 1.0);
  CHECK_THROWS_AS(acceptance_estimate(SectionSample{}), Error);
  CHECK_THROWS_AS(sample_iur_sections(cube(), 0, RngStream(1, 0)), Error);
}

TEST_CASE("cube acceptance rate is mean width over enclosing diameter") {
  const auto s = sample_iur_sections(cube(), 200000, RngStream(3, 0));
  const double expected = 1.5 / std::sqrt(3.0);
  const double se = std::sqrt(expected * (1 - expected) / static_cast<double>(s.n_proposed));
  CHECK(std::abs(acceptance_estimate(s) - expected) < 5.0 * se);
}

TEST_CASE("ball section areas follow the ball law") {
  const auto s = sample_iur_sections(Ball<3>(Point<3>(0, 0, 0), 1.0), 100000, RngStream(4, 0));
  const double d = ks_one_sample(s.values, [](double a) { return oracles::ball_section_cdf(std::min(a, std::numbers::pi)); });
  CHECK(d < 0.0061);
}

TEST_CASE("square chords follow the chord length law") {
  const auto s = sample_iur_sections(square(), 100000, RngStream(8, 0));
  CHECK(ks_one_sample(s.values, square_chord_cdf) < 0.0061);
}

TEST_CASE("fixed-orientation sections") {
  const Direction<3> z(Point<3>(0, 0, 1));
  const auto s = sample_fur_sections(cube(), z, 1000, RngStream(1, 0));
  for (double v : s.values) CHECK(v == doctest::Approx(1.0));
  CHECK(s.n_proposed == 1000);
  // disk chords at offset S ~ U(-1, 1): P(chord <= c) = 1 - sqrt(1 - c^2 / 4)
  const auto chords = sample_fur_sections(Ball<2>(Point<2>(0, 0), 1.0), Direction<2>(Point<2>(1, 0)), 100000,
                                          RngStream(2, 0));
  const double d = ks_one_sample(chords.values, [](double c) { return 1.0 - std::sqrt(std::max(0.0, 1.0 - c * c / 4.0)); });
  CHECK(d < 0.0061);
}

TEST_CASE("invariance trials") {
  const auto t = validation::translation_trials(cube(), 20000, 3, 11, 0.0272);
  CHECK(t.trials == 3);
  CHECK(t.passes >= 2);
  const auto r = validation::rotation_trials(cube(), 20000, 3, 12, 0.0272);
  CHECK(r.passes >= 2);
  const auto sc = validation::scaling_trials(cube(), 2.0, 20000, 3, 13, 0.0272);
  CHECK(sc.passes >= 2);
}

TEST_CASE("random rotations are proper") {
  RngStream rng(1, 0);
  for (int i = 0; i < 50; ++i) {
    const Matrix<3> m = validation::random_rotation<3>(rng);
    CHECK((m * m.transpose() - Matrix<3>::Identity()).norm() < 1e-12);
    CHECK(m.determinant() == doctest::Approx(1.0));
  }
}
