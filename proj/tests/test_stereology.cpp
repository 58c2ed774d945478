#include <doctest.h>

#include <cmath>

#include "section_lab/stereology.hpp"

using namespace section_lab;

namespace {

const Polytope<3>& unit_dodecahedron() {
  static const auto d = std::get<Polytope<3>>(builtin_body({BuiltinShape::dodecahedron, 3, 0}, true));
  return d;
}

const ReferenceDensity& reference() {
  static const ReferenceDensity r =
      make_reference_density(sample_iur_sections(unit_dodecahedron(), 200000, RngStream(77, 1)));
  return r;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InputError;
}

}  // namespace

TEST_CASE("length biasing of parametric laws") {
  const auto e = length_biased(SizeDistribution::exponential(2.0));
  CHECK(e.kind() == SizeDistribution::Kind::gamma);
  CHECK(e.shape() == 2.0);
  CHECK(e.rate() == 2.0);
  const auto g = length_biased(SizeDistribution::gamma(3.0, 0.5));
  CHECK(g.shape() == 4.0);
  CHECK(g.rate() == 0.5);
  CHECK(unbias(g).shape() == doctest::Approx(3.0));
  const auto p = length_biased(SizeDistribution::point_mass(1.7));
  CHECK(p.kind() == SizeDistribution::Kind::point_mass);
  CHECK(p.location() == 1.7);
}

TEST_CASE("length biasing of step laws") {
  const StepCDF h = StepCDF::from_weights({1.0, 2.0, 4.0}, {0.5, 0.25, 0.25});
  const auto hb = length_biased(SizeDistribution::step(h));
  const auto w = hb.step_cdf().weights();
  // w_j x_j / sum = {0.5, 0.5, 1} / 2
  CHECK(w[0] == doctest::Approx(0.25));
  CHECK(w[1] == doctest::Approx(0.25));
  CHECK(w[2] == doctest::Approx(0.5));
  const auto back = unbias(hb).step_cdf().weights();
  CHECK(back[0] == doctest::Approx(0.5));
  CHECK(back[1] == doctest::Approx(0.25));
  CHECK(back[2] == doctest::Approx(0.25));
}

TEST_CASE("distribution functions and means") {
  const auto e = SizeDistribution::exponential(1.0);
  CHECK(e.cdf(1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(e.mean() == 1.0);
  const auto g = SizeDistribution::gamma(2.0, 1.0);
  CHECK(g.cdf(2.0) == doctest::Approx(1.0 - 3.0 * std::exp(-2.0)));
  CHECK(g.mean() == 2.0);
  const auto p = SizeDistribution::point_mass(3.0);
  CHECK(p.cdf(2.999) == 0.0);
  CHECK(p.cdf(3.0) == 1.0);
}

TEST_CASE("sampling matches the law") {
  RngStream rng(1, 0);
  for (const auto& law : {SizeDistribution::gamma(2.0, 1.0), SizeDistribution::gamma(2.5, 3.0),
                          SizeDistribution::gamma(0.5, 1.0)}) {
    std::vector<double> x(50000);
    for (double& v : x) v = law.sample(rng);
    CHECK(ks_one_sample(x, [&](double t) { return law.cdf(t); }) < 0.0077);
  }
  const auto step = SizeDistribution::step(StepCDF::from_weights({1.0, 2.0}, {0.3, 0.7}));
  int ones = 0;
  for (int i = 0; i < 100000; ++i) ones += step.sample(rng) == 1.0;
  CHECK(std::abs(ones / 1e5 - 0.3) < 0.01);
}

TEST_CASE("invalid laws") {
  CHECK(code_of([] { SizeDistribution::exponential(0.0); }) == ErrorCode::InputError);
  CHECK(code_of([] { SizeDistribution::point_mass(0.0); }) == ErrorCode::ZeroLocation);
  CHECK(code_of([] { SizeDistribution::step(StepCDF::from_weights({0.0, 1.0}, {0.5, 0.5})); }) ==
        ErrorCode::ZeroLocation);
}

TEST_CASE("profile sizes of a point mass are scaled sections") {
  const auto& body = unit_dodecahedron();
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = sample_profile_sizes(body, SizeDistribution::point_mass(2.0), 100000, RngStream(seed, 0));
    auto x = root_transform(sample_iur_sections(body, 100000, RngStream(seed, 1)));
    for (double& v : x) v *= 2.0;
    passes += ks_two_sample(s, x) < 0.0122;
  }
  CHECK(passes >= 18);
}

TEST_CASE("reference density") {
  const auto& g = reference();
  CHECK(g(0.0) == 0.0);
  CHECK(g(-1.0) == 0.0);
  CHECK(g(g.support_max) == 0.0);
  CHECK(g(0.5) > 0.0);
  double mass = 0.0;
  const int steps = 20000;
  for (int i = 0; i < steps; ++i) mass += g((i + 0.5) * g.support_max / steps) * g.support_max / steps;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("NPMLE by EM") {
  const auto obs =
      sample_profile_sizes(unit_dodecahedron(), SizeDistribution::exponential(1.0), 300, RngStream(3, 0));
  const auto& g = reference();
  const NpmleResult r = npmle_em(obs, g, 1e-8, 20000);
  CHECK(r.converged);
  CHECK(r.tol == 1e-8);
  double total = 0.0;
  for (double w : r.hb.weights()) {
    CHECK(w >= 0.0);
    total += w;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < r.loglik_trace.size(); ++i) {
    CHECK(r.loglik_trace[i] >= r.loglik_trace[i - 1] - 1e-12);
  }
  CHECK(r.loglik_trace.size() == r.iterations + 1);
  const double fitted = log_likelihood(r.hb, obs, g);
  CHECK(fitted == doctest::Approx(r.final_loglik).epsilon(1e-9));

  SUBCASE("beats random weightings on the same support") {
    std::vector<double> atoms = obs;
    std::sort(atoms.begin(), atoms.end());
    RngStream rng(5, 0);
    for (int t = 0; t < 10; ++t) {
      std::vector<double> w(atoms.size());
      for (double& v : w) v = rng.uniform_pos();
      CHECK(fitted >= log_likelihood(StepCDF::from_weights(atoms, w), obs, g) - 1e-7);
    }
  }

  SUBCASE("beats the true law discretized onto the observations") {
    std::vector<double> atoms = obs;
    std::sort(atoms.begin(), atoms.end());
    const auto truth = SizeDistribution::gamma(2.0, 1.0);
    std::vector<double> w(atoms.size());
    double prev = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const double edge = j + 1 < atoms.size() ? 0.5 * (atoms[j] + atoms[j + 1]) : 1e300;
      const double c = truth.cdf(edge);
      w[j] = c - prev;
      prev = c;
    }
    CHECK(fitted >= log_likelihood(StepCDF::from_weights(atoms, w), obs, g));
  }
}

TEST_CASE("step law examples") {
  const auto hb = length_biased(SizeDistribution::step(StepCDF::from_weights({1.0, 2.0}, {0.5, 0.5})));
  CHECK(hb.step_cdf().weights()[0] == doctest::Approx(1.0 / 3.0));
  CHECK(hb.step_cdf().weights()[1] == doctest::Approx(2.0 / 3.0));
  const auto h = unbias(hb).step_cdf().weights();
  CHECK(std::abs(h[0] - 0.5) <= 1e-12);
  CHECK(std::abs(h[1] - 0.5) <= 1e-12);
  CHECK(unbias(SizeDistribution::point_mass(2.0)).location() == 2.0);
}

TEST_CASE("likelihood of a toy mixture") {
  // triangular gS(x) = 2 (1 - x) on (0, 1)
  const ReferenceDensity tri{[](double x) { return 2.0 * (1.0 - x); }, 1.0};
  const std::vector<double> s{0.5, 1.0};
  const StepCDF hb = StepCDF::from_weights({1.0, 2.0}, {0.5, 0.5});
  // s=0.5: 0.5 g(0.5) + 0.5 g(0.25)/2 = 0.875; s=1: 0.5 g(1) + 0.5 g(0.5)/2 = 0.25
  CHECK(log_likelihood(hb, s, tri) == doctest::Approx(0.5 * (std::log(0.875) + std::log(0.25))).epsilon(1e-14));
  // scaling atoms and observations by c shifts each term by -log c
  const std::vector<double> s3{1.5, 3.0};
  const StepCDF hb3 = StepCDF::from_weights({3.0, 6.0}, {0.5, 0.5});
  CHECK(log_likelihood(hb3, s3, tri) == doctest::Approx(log_likelihood(hb, s, tri) - std::log(3.0)).epsilon(1e-14));
  const std::vector<double> same(5, 0.4);
  const ReferenceDensity flat{[](double) { return 0.5; }, 2.0};
  const NpmleResult r = npmle_em(same, flat);
  CHECK(r.hb.locations == std::vector<double>{0.4});
}

TEST_CASE("point-mass particles are recovered") {
  const Ball<3> ball(Point<3>(0, 0, 0), 1.0);
  const ReferenceDensity g = make_reference_density(sample_iur_sections(ball, 1000000, RngStream(9, 1)));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto obs = sample_profile_sizes(ball, SizeDistribution::point_mass(1.0), 2000, RngStream(seed, 0));
    const NpmleResult r = npmle_em(obs, g);
    const auto w = r.hb.weights();
    double near = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (r.hb.locations[j] >= 0.9 && r.hb.locations[j] <= 1.1) near += w[j];
    }
    CHECK(near >= 0.9);
  }
}

TEST_CASE("likelihood errors") {
  const auto& g = reference();
  const std::vector<double> far{1e6};
  const StepCDF unit = StepCDF::from_weights({1.0}, {1.0});
  CHECK(code_of([&] { log_likelihood(unit, far, g); }) == ErrorCode::AllZeroLikelihood);
  CHECK(code_of([&] { npmle_em(std::vector<double>{}, g); }) == ErrorCode::EmptySample);
  CHECK(code_of([&] { npmle_em(std::vector<double>{0.0, 1.0}, g); }) == ErrorCode::ZeroLocation);
}
