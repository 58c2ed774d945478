#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "section_lab/density.hpp"
#include "section_lab/geometry.hpp"
#include "section_lab/rng.hpp"
#include "section_lab/sampler.hpp"

namespace section_lab::validation {

struct Check {
  std::string name;
  bool passed = false;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Outcome of repeated two-sample KS comparisons.
struct TrialSummary {
  int passes = 0;
  int trials = 0;
  double worst = 0.0;
};

/// Haar-random rotation (determinant +1).
template <int Dim>
Matrix<Dim> random_rotation(RngStream& rng) {
  if constexpr (Dim == 2) {
    const double a = 2.0 * std::numbers::pi * rng.uniform();
    Matrix<2> m;
    m << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return m;
  } else {
    // Uniform unit quaternion (Shoemake).
    const double u1 = rng.uniform();
    const double u2 = 2.0 * std::numbers::pi * rng.uniform();
    const double u3 = 2.0 * std::numbers::pi * rng.uniform();
    const Eigen::Quaterniond q(std::sqrt(u1) * std::cos(u3), std::sqrt(1.0 - u1) * std::sin(u2),
                               std::sqrt(1.0 - u1) * std::cos(u2), std::sqrt(u1) * std::sin(u3));
    return q.normalized().toRotationMatrix();
  }
}

/// Draws `trials` pairs of samples (K and its image under `transform`,
/// values mapped back by `rescale`) and counts KS statistics below
/// `critical`. Trial t uses streams (seed, 2t) and (seed, 2t + 1).
template <class Body, class Transform, class Rescale>
TrialSummary ks_trials(const Body& body, Transform&& transform, Rescale&& rescale, std::size_t n,
                       int trials, std::uint64_t seed, double critical,
                       const SamplerOptions& options = {}) {
  TrialSummary out;
  out.trials = trials;
  for (int t = 0; t < trials; ++t) {
    RngStream transform_rng(seed, 1000000 + static_cast<std::uint64_t>(t));
    const Body image = transform(body, transform_rng);
    const SectionSample a = sample_iur_sections(body, n, RngStream(seed, 2 * t), options);
    SectionSample b = sample_iur_sections(image, n, RngStream(seed, 2 * t + 1), options);
    for (double& v : b.values) v = rescale(v);
    const double d = ks_two_sample(a.values, b.values);
    out.worst = std::max(out.worst, d);
    if (d < critical) ++out.passes;
  }
  return out;
}

template <class Body>
TrialSummary translation_trials(const Body& body, std::size_t n, int trials, std::uint64_t seed,
                                double critical, const SamplerOptions& options = {}) {
  constexpr int Dim = Body::dim;
  return ks_trials(
      body,
      [](const Body& k, RngStream& rng) {
        Point<Dim> shift;
        for (int d = 0; d < Dim; ++d) shift(d) = rng.uniform(-5.0, 5.0);
        return translated(k, shift);
      },
      [](double v) { return v; }, n, trials, seed, critical, options);
}

template <class Body>
TrialSummary rotation_trials(const Body& body, std::size_t n, int trials, std::uint64_t seed,
                             double critical, const SamplerOptions& options = {}) {
  constexpr int Dim = Body::dim;
  return ks_trials(
      body,
      [](const Body& k, RngStream& rng) {
        return transformed(k, random_rotation<Dim>(rng), Point<Dim>(Point<Dim>::Zero()));
      },
      [](double v) { return v; }, n, trials, seed, critical, options);
}

template <class Body>
TrialSummary scaling_trials(const Body& body, double factor, std::size_t n, int trials,
                            std::uint64_t seed, double critical,
                            const SamplerOptions& options = {}) {
  constexpr int Dim = Body::dim;
  const double volume_factor = std::pow(factor, Dim - 1);
  return ks_trials(
      body, [factor](const Body& k, RngStream&) { return scaled(k, factor); },
      [volume_factor](double v) { return v / volume_factor; }, n, trials, seed, critical, options);
}

/// Largest excess of G_L(z) over G_K(z) r + (1 - r) on `grid`, where
/// r = mean_width(K) / mean_width(L).
double inclusion_excess(const std::vector<double>& sample_k, const std::vector<double>& sample_l,
                        double width_ratio, const std::vector<double>& grid);

}  // namespace section_lab::validation
