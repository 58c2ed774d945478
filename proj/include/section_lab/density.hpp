#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "section_lab/sampler.hpp"

namespace section_lab {

enum class Transform { root_scale, volume_scale };

std::string_view to_string(Transform t);

struct DensityEstimate {
  std::vector<double> grid;
  std::vector<double> values;
  double bandwidth = 0.0;
  Transform transform = Transform::root_scale;
  std::size_t sample_size = 0;

  /// Linear interpolation on the grid, 0 outside it.
  double operator()(double z) const;
};

/// Right-continuous step function with jumps at `locations`.
struct StepCDF {
  std::vector<double> locations;   // strictly increasing
  std::vector<double> cumulative;  // nondecreasing, last entry 1

  double operator()(double x) const;
  /// Jump sizes, cumulative[i] - cumulative[i-1].
  std::vector<double> weights() const;
  static StepCDF from_weights(std::vector<double> locations, std::vector<double> weights);
};

/// X_i = Z_i^{1/(dim-1)}: identity in 2D, square root in 3D.
std::vector<double> root_transform(std::span<const double> volumes, int dim);
std::vector<double> root_transform(const SectionSample& sample);

/// Gaussian reflection estimator
///   g(z) = 1/(hN) sum_i [k((z - X_i)/h) + k((z + X_i)/h)],  z >= 0,
/// evaluated on `grid`. Kernel terms beyond 10 bandwidths (relative weight
/// below e^-50) are skipped.
DensityEstimate reflection_kde(std::span<const double> x, double h, std::span<const double> grid,
                               int workers = 1);

/// `points` equispaced offsets on [0, max(x) + 4h].
std::vector<double> default_grid(std::span<const double> x, double h, std::size_t points = 512);

struct Bandwidth {
  double h = 0.0;
  std::string method;  // "sheather-jones" or "silverman-fallback"
  bool fallback = false;
};

/// Solve-the-equation Sheather-Jones bandwidth computed on the reflected
/// sample {X_i} u {-X_i}, using binned pair counts for the functional
/// estimates. Falls back to Silverman's rule (flagged) when the plug-in
/// equation has no root in [h_silverman/100, 100 h_silverman].
Bandwidth sheather_jones_bandwidth(std::span<const double> x);

/// Silverman's rule 0.9 min(sd, IQR/1.34) m^{-1/5} on the reflected sample.
double silverman_bandwidth(std::span<const double> x);

/// g_K(z) = g^S(z^{1/(n-1)}) z^{(2-n)/(n-1)} / (n-1) on `grid`, reading g^S
/// by linear interpolation. dim 3 grids must be strictly positive.
DensityEstimate untransform_density(const DensityEstimate& root_estimate, int dim,
                                    std::span<const double> grid);

StepCDF empirical_cdf(std::span<const double> x);

double trapezoid(std::span<const double> grid, std::span<const double> values);

// Kolmogorov-Smirnov distances ------------------------------------------------

/// sup_x |F_n(x) - F(x)| for a continuous reference CDF.
template <class Cdf>
double ks_one_sample(std::vector<double> sample, Cdf&& cdf);

double ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace section_lab

#include <algorithm>
#include <cmath>

namespace section_lab {

template <class Cdf>
double ks_one_sample(std::vector<double> sample, Cdf&& cdf) {
  if (sample.empty()) {
    throw Error(ErrorCode::EmptySample, "KS statistic of an empty sample");
  }
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace section_lab
