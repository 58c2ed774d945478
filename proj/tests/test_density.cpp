#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "section_lab/density.hpp"
#include "section_lab/oracles.hpp"
#include "section_lab/sampler.hpp"

using namespace section_lab;

namespace {

std::vector<double> half_normal(std::size_t n, std::uint32_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d;
  std::vector<double> x(n);
  for (double& v : x) v = std::abs(d(gen));
  return x;
}

double phi(double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi); }

// Plain Gaussian KDE of an explicit sample.
double classical_kde(const std::vector<double>& y, double h, double z) {
  double sum = 0.0;
  for (double v : y) sum += phi((z - v) / h);
  return sum / (static_cast<double>(y.size()) * h);
}

std::vector<double> reflect(const std::vector<double>& x) {
  std::vector<double> y = x;
  for (double v : x) y.push_back(-v);
  return y;
}

// Unbinned solve-the-equation plug-in bandwidth on an explicit sample,
// O(m^2) per functional.
double exact_sj(const std::vector<double>& y) {
  const double m = static_cast<double>(y.size());
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= m;
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (m - 1.0));
  std::vector<double> s = y;
  std::sort(s.begin(), s.end());
  auto q = [&](double p) {
    const double pos = p * (m - 1.0);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
  };
  const double scale = std::min(sd, (q(0.75) - q(0.25)) / 1.349);
  auto functional = [&](double h, int order) {
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j) {
        const double u = (y[i] - y[j]) / h;
        const double u2 = u * u;
        const double poly = order == 4 ? u2 * u2 - 6.0 * u2 + 3.0
                                       : u2 * u2 * u2 - 15.0 * u2 * u2 + 45.0 * u2 - 15.0;
        sum += phi(u) * poly;
      }
    return sum / (m * (m - 1.0) * std::pow(h, order + 1));
  };
  const double a = 1.24 * scale * std::pow(m, -1.0 / 7.0);
  const double b = 1.23 * scale * std::pow(m, -1.0 / 9.0);
  const double alpha2 = 1.357 * std::pow(functional(a, 4) / -functional(b, 6), 1.0 / 7.0);
  const double c1 = 1.0 / (2.0 * std::sqrt(std::numbers::pi) * m);
  auto eq = [&](double h) { return std::pow(c1 / functional(alpha2 * std::pow(h, 5.0 / 7.0), 4), 0.2) - h; };
  double lo = 0.01 * scale;
  double hi = 2.0 * scale;
  REQUIRE(eq(lo) * eq(hi) < 0.0);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((eq(mid) > 0.0) == (eq(lo) > 0.0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("reflection estimator is twice the KDE of the reflected sample") {
  const auto x = half_normal(2000, 1);
  const auto y = reflect(x);
  for (double h : {0.05, 0.2, sheather_jones_bandwidth(x).h}) {
    const auto grid = default_grid(x, h, 257);
    const auto est = reflection_kde(x, h, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(est.values[i] - 2.0 * classical_kde(y, h, grid[i])) <= 1e-12);
    }
  }
}

TEST_CASE("estimate integrates to one") {
  const auto x = half_normal(50000, 2);
  const double h = sheather_jones_bandwidth(x).h;
  const auto grid = default_grid(x, h);
  const auto est = reflection_kde(x, h, grid);
  CHECK(std::abs(trapezoid(est.grid, est.values) - 1.0) <= 1e-3);
}

TEST_CASE("zero right-derivative at the boundary") {
  const auto x = half_normal(1000, 3);
  const double h = 0.2;
  const double d = 1e-4;
  const std::vector<double> grid{0.0, d, 2.0 * d};
  const auto est = reflection_kde(x, h, grid);
  // one-sided second-order difference; the odd-order error terms vanish for
  // an even function
  const double slope = (-3.0 * est.values[0] + 4.0 * est.values[1] - est.values[2]) / (2.0 * d);
  CHECK(std::abs(slope) <= 1e-9);
}

TEST_CASE("worker count does not change the estimate") {
  const auto x = half_normal(5000, 4);
  const auto grid = default_grid(x, 0.1, 300);
  CHECK(reflection_kde(x, 0.1, grid, 1).values == reflection_kde(x, 0.1, grid, 3).values);
}

TEST_CASE("binned Sheather-Jones agrees with the unbinned computation") {
  for (std::uint32_t seed : {5u, 6u, 7u}) {
    const auto x = half_normal(400, seed);
    const Bandwidth bw = sheather_jones_bandwidth(x);
    CHECK_FALSE(bw.fallback);
    CHECK(bw.method == "sheather-jones");
    CHECK(bw.h == doctest::Approx(exact_sj(reflect(x))).epsilon(1e-2));
  }
}

TEST_CASE("Sheather-Jones on normal data is near the AMISE bandwidth") {
  const auto x = half_normal(100000, 8);
  // reflected sample is N(0,1) of size 2N; h_AMISE = (4/3)^{1/5} (2N)^{-1/5}
  const double amise = std::pow(4.0 / 3.0, 0.2) * std::pow(2.0e5, -0.2);
  CHECK(sheather_jones_bandwidth(x).h == doctest::Approx(amise).epsilon(0.1));
}

TEST_CASE("Silverman's rule on the reflected sample") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  // reflected: -4..4, sd = sqrt(60/7), IQR (type 7) = 5.5
  const double sd = std::sqrt(60.0 / 7.0);
  const double want = 0.9 * std::min(sd, 5.5 / 1.34) * std::pow(8.0, -0.2);
  CHECK(silverman_bandwidth(x) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("back-transform to the volume scale") {
  DensityEstimate root;
  root.grid = {0.0, 1.0, 2.0};
  root.values = {0.5, 1.0, 0.0};
  const std::vector<double> grid{0.25, 1.0};
  const auto v = untransform_density(root, 3, grid);
  CHECK(v.values[0] == doctest::Approx(0.75 / (2.0 * 0.5)));
  CHECK(v.values[1] == doctest::Approx(0.5));
  CHECK(v.transform == Transform::volume_scale);
  const std::vector<double> with_zero{0.0, 1.0};
  try {
    untransform_density(root, 3, with_zero);
    FAIL("expected ZeroGridPoint");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroGridPoint);
  }
  CHECK(untransform_density(root, 2, with_zero).values[0] == 0.5);

  // integrates to one on the volume scale
  const auto sample = sample_iur_sections(Ball<3>(Point<3>(0, 0, 0), 1.0), 100000, RngStream(1, 0));
  const auto x = root_transform(sample);
  const double h = sheather_jones_bandwidth(x).h;
  const auto est = reflection_kde(x, h, default_grid(x, h, 2048));
  std::vector<double> vgrid;
  const double top = est.grid.back() * est.grid.back();
  for (int i = 1; i <= 20000; ++i) vgrid.push_back(top * i / 20000.0);
  const auto vol = untransform_density(est, 3, vgrid);
  // the missing (0, top/20000) piece carries mass about sqrt(top/20000) g(0)
  CHECK(trapezoid(vol.grid, vol.values) == doctest::Approx(1.0).epsilon(2e-2));
}

TEST_CASE("empirical CDF merges ties") {
  const std::vector<double> x{2.0, 1.0, 1.0, 3.0};
  const StepCDF f = empirical_cdf(x);
  CHECK(f.locations == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(f.cumulative == std::vector<double>{0.5, 0.75, 1.0});
  CHECK(f(0.5) == 0.0);
  CHECK(f(1.0) == 0.5);
  CHECK(f(2.5) == 0.75);
  CHECK(f(9.0) == 1.0);
  const auto w = f.weights();
  CHECK(w[0] == 0.5);
  CHECK(w[1] == 0.25);
  const StepCDF g = StepCDF::from_weights({1.0, 2.0}, {3.0, 1.0});
  CHECK(g.cumulative == std::vector<double>{0.75, 1.0});
}

TEST_CASE("KS distances") {
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{5, 6, 7, 8};
  CHECK(ks_two_sample(a, a) == 0.0);
  CHECK(ks_two_sample(a, b) == 1.0);
  CHECK(ks_two_sample({1, 2}, {1.5}) == doctest::Approx(0.5));
  CHECK(ks_one_sample({0.5}, [](double u) { return u; }) == doctest::Approx(0.5));
}

TEST_CASE("density interpolation") {
  DensityEstimate e;
  e.grid = {0.0, 1.0};
  e.values = {1.0, 3.0};
  CHECK(e(0.25) == doctest::Approx(1.5));
  CHECK(e(2.0) == 0.0);
  CHECK(e(-1.0) == 0.0);
}

TEST_CASE("errors") {
  const std::vector<double> empty;
  const std::vector<double> flat(100, 1.0);
  const std::vector<double> grid{0.0, 1.0};
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InputError;
  };
  CHECK(code_of([&] { reflection_kde(empty, 0.1, grid); }) == ErrorCode::EmptySample);
  CHECK(code_of([&] { reflection_kde(flat, 0.0, grid); }) == ErrorCode::NonPositiveBandwidth);
  CHECK(code_of([&] { sheather_jones_bandwidth(flat); }) == ErrorCode::ZeroVariance);
  CHECK(code_of([&] { empirical_cdf(empty); }) == ErrorCode::EmptySample);
  CHECK(code_of([&] { ks_one_sample({}, [](double) { return 0.0; }); }) == ErrorCode::EmptySample);
}

TEST_CASE("doubling the sample size reduces the error against the square density") {
  const auto square = std::get<Polytope<2>>(builtin_body({BuiltinShape::square, 2, 0}, false));
  std::vector<double> grid;
  for (int i = 0; i <= 1400; ++i) grid.push_back(0.001 * i);
  auto ise = [&](std::size_t n, std::uint64_t seed) {
    const auto x = root_transform(sample_iur_sections(square, n, RngStream(seed, 0)));
    const auto est = reflection_kde(x, sheather_jones_bandwidth(x).h, grid);
    std::vector<double> sq(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double e = est.values[i] - oracles::square_chord_density(grid[i]);
      sq[i] = e * e;
    }
    return trapezoid(grid, sq);
  };
  int better = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    better += ise(20000, 100 + seed) < ise(10000, seed);
  }
  CHECK(better >= 9);
}
