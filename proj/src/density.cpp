#include "section_lab/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

namespace section_lab {

namespace {

constexpr double kKernelCutoff = 10.0;
constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2 pi)
constexpr int kSjBins = 4096;

void require_nonempty(std::span<const double> x) {
  if (x.empty()) {
    throw Error(ErrorCode::EmptySample, "sample is empty");
  }
}

/// Read-only view of the sorted reflected sample {-X_i} u {X_i} of size 2N.
class ReflectedSorted {
 public:
  explicit ReflectedSorted(const std::vector<double>& sorted_abs) : x_(sorted_abs) {}
  std::size_t size() const { return 2 * x_.size(); }
  double operator[](std::size_t k) const {
    const std::size_t n = x_.size();
    return k < n ? -x_[n - 1 - k] : x_[k - n];
  }
  /// Type-7 quantile (linear interpolation between order statistics).
  double quantile(double p) const {
    const double pos = p * static_cast<double>(size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, size() - 1);
    return (*this)[lo] + (pos - static_cast<double>(lo)) * ((*this)[hi] - (*this)[lo]);
  }

 private:
  const std::vector<double>& x_;
};

struct ReflectedStats {
  std::vector<double> sorted;  // |X| ascending
  double sd = 0.0;             // of the 2N sample
  double iqr = 0.0;
  double m = 0.0;  // 2N
};

ReflectedStats reflected_stats(std::span<const double> x) {
  ReflectedStats s;
  s.sorted.assign(x.begin(), x.end());
  for (double& v : s.sorted) v = std::abs(v);
  std::sort(s.sorted.begin(), s.sorted.end());
  s.m = 2.0 * static_cast<double>(x.size());
  // The reflected sample has mean exactly zero.
  long double sum_sq = 0.0L;
  for (double v : s.sorted) sum_sq += static_cast<long double>(v) * v;
  s.sd = std::sqrt(static_cast<double>(2.0L * sum_sq / (s.m - 1.0)));
  const ReflectedSorted view(s.sorted);
  s.iqr = view.quantile(0.75) - view.quantile(0.25);
  return s;
}

void check_variance(std::span<const double> x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) {
    throw Error(ErrorCode::ZeroVariance, "sample has zero variance");
  }
}

/// Binned pair-distance counts of the reflected sample. counts[k] is the
/// number of unordered pairs whose bins are k apart; `delta` the bin width.
struct PairCounts {
  std::vector<double> counts;
  double delta = 0.0;
};

PairCounts binned_pairs(const ReflectedStats& s) {
  const double xmax = s.sorted.back();
  const double xmin = -xmax;
  const double delta = (xmax - xmin) * 1.01 / kSjBins;
  std::vector<double> bins(kSjBins, 0.0);
  auto bin_of = [&](double v) {
    const auto b = static_cast<long>(std::floor((v - xmin) / delta));
    return std::clamp<long>(b, 0, kSjBins - 1);
  };
  for (double v : s.sorted) {
    bins[bin_of(v)] += 1.0;
    bins[bin_of(-v)] += 1.0;
  }
  PairCounts out;
  out.delta = delta;
  out.counts.assign(kSjBins, 0.0);
  for (int i = 0; i < kSjBins; ++i) {
    if (bins[i] == 0.0) continue;
    out.counts[0] += bins[i] * (bins[i] - 1.0) / 2.0;
    for (int j = i + 1; j < kSjBins; ++j) {
      out.counts[j - i] += bins[i] * bins[j];
    }
  }
  return out;
}

/// Estimate of int f''''(x) f(x) dx with Gaussian pilot bandwidth h.
double phi4(const PairCounts& p, double m, double h) {
  double sum = 0.0;
  for (std::size_t k = 0; k < p.counts.size(); ++k) {
    double d = static_cast<double>(k) * p.delta / h;
    d *= d;
    if (d >= 1000.0) break;
    sum += std::exp(-d / 2.0) * (d * d - 6.0 * d + 3.0) * p.counts[k];
  }
  sum = 2.0 * sum + m * 3.0;
  return sum / (m * (m - 1.0) * std::pow(h, 5.0)) * kInvSqrt2Pi;
}

/// Estimate of int f^(6)(x) f(x) dx.
double phi6(const PairCounts& p, double m, double h) {
  double sum = 0.0;
  for (std::size_t k = 0; k < p.counts.size(); ++k) {
    double d = static_cast<double>(k) * p.delta / h;
    d *= d;
    if (d >= 1000.0) break;
    sum += std::exp(-d / 2.0) * (d * d * d - 15.0 * d * d + 45.0 * d - 15.0) * p.counts[k];
  }
  sum = 2.0 * sum - 15.0 * m;
  return sum / (m * (m - 1.0) * std::pow(h, 7.0)) * kInvSqrt2Pi;
}

double silverman_from_stats(const ReflectedStats& s) {
  double scale = std::min(s.sd, s.iqr / 1.34);
  if (!(scale > 0.0)) scale = s.sd;
  return 0.9 * scale * std::pow(s.m, -0.2);
}

}  // namespace

std::string_view to_string(Transform t) {
  return t == Transform::root_scale ? "root_scale" : "volume_scale";
}

double DensityEstimate::operator()(double z) const {
  if (grid.empty() || z < grid.front() || z > grid.back()) return 0.0;
  const auto it = std::upper_bound(grid.begin(), grid.end(), z);
  if (it == grid.end()) return values.back();
  const auto hi = static_cast<std::size_t>(it - grid.begin());
  const std::size_t lo = hi - 1;
  const double t = (z - grid[lo]) / (grid[hi] - grid[lo]);
  return values[lo] + t * (values[hi] - values[lo]);
}

double StepCDF::operator()(double x) const {
  const auto it = std::upper_bound(locations.begin(), locations.end(), x);
  if (it == locations.begin()) return 0.0;
  return cumulative[static_cast<std::size_t>(it - locations.begin()) - 1];
}

std::vector<double> StepCDF::weights() const {
  std::vector<double> w(cumulative.size());
  std::adjacent_difference(cumulative.begin(), cumulative.end(), w.begin());
  return w;
}

StepCDF StepCDF::from_weights(std::vector<double> locations, std::vector<double> weights) {
  StepCDF out;
  out.locations = std::move(locations);
  out.cumulative.resize(weights.size());
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double run = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    run += weights[i];
    out.cumulative[i] = run / total;
  }
  if (!out.cumulative.empty()) out.cumulative.back() = 1.0;
  return out;
}

std::vector<double> root_transform(std::span<const double> volumes, int dim) {
  if (dim != 2 && dim != 3) {
    throw Error(ErrorCode::InputError, "dimension must be 2 or 3");
  }
  std::vector<double> out(volumes.begin(), volumes.end());
  if (dim == 3) {
    for (double& v : out) v = std::sqrt(v);
  }
  return out;
}

std::vector<double> root_transform(const SectionSample& sample) {
  return root_transform(sample.values, sample.dim);
}

DensityEstimate reflection_kde(std::span<const double> x, double h, std::span<const double> grid,
                               int workers) {
  require_nonempty(x);
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::NonPositiveBandwidth, "bandwidth must be positive");
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0.0) {
    throw Error(ErrorCode::InputError, "reflection estimator needs nonnegative data");
  }

  DensityEstimate est;
  est.grid.assign(grid.begin(), grid.end());
  est.values.assign(grid.size(), 0.0);
  est.bandwidth = h;
  est.sample_size = x.size();

  const double reach = kKernelCutoff * h;
  const double norm = kInvSqrt2Pi / (h * static_cast<double>(x.size()));
  auto evaluate = [&](std::size_t begin, std::size_t end) {
    for (std::size_t g = begin; g < end; ++g) {
      const double z = est.grid[g];
      double sum = 0.0;
      auto lo = std::lower_bound(sorted.begin(), sorted.end(), z - reach);
      auto hi = std::upper_bound(lo, sorted.end(), z + reach);
      for (auto it = lo; it != hi; ++it) {
        const double u = (z - *it) / h;
        sum += std::exp(-0.5 * u * u);
      }
      // mirrored terms: only points with z + X_i <= reach contribute
      auto mirror_end = std::upper_bound(sorted.begin(), sorted.end(), reach - z);
      for (auto it = sorted.begin(); it < mirror_end; ++it) {
        const double u = (z + *it) / h;
        sum += std::exp(-0.5 * u * u);
      }
      est.values[g] = sum * norm;
    }
  };

  const std::size_t threads =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, grid.size() ? grid.size() : 1);
  if (threads == 1) {
    evaluate(0, grid.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t per = (grid.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t b = t * per;
      const std::size_t e = std::min(grid.size(), b + per);
      if (b < e) pool.emplace_back(evaluate, b, e);
    }
    for (auto& t : pool) t.join();
  }
  return est;
}

std::vector<double> default_grid(std::span<const double> x, double h, std::size_t points) {
  require_nonempty(x);
  if (points < 2) {
    throw Error(ErrorCode::InputError, "grid needs at least two points");
  }
  const double top = *std::max_element(x.begin(), x.end()) + 4.0 * h;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = top * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

double silverman_bandwidth(std::span<const double> x) {
  require_nonempty(x);
  check_variance(x);
  return silverman_from_stats(reflected_stats(x));
}

Bandwidth sheather_jones_bandwidth(std::span<const double> x) {
  if (x.size() < 16) {
    throw Error(ErrorCode::InputError, "Sheather-Jones needs at least 16 observations");
  }
  check_variance(x);
  const ReflectedStats s = reflected_stats(x);
  const double h_silverman = silverman_from_stats(s);
  const Bandwidth fallback{h_silverman, "silverman-fallback", true};

  double scale = std::min(s.sd, s.iqr / 1.349);
  if (!(scale > 0.0)) scale = s.sd;
  const double m = s.m;
  const PairCounts pairs = binned_pairs(s);

  const double a = 1.24 * scale * std::pow(m, -1.0 / 7.0);
  const double b = 1.23 * scale * std::pow(m, -1.0 / 9.0);
  const double c1 = 1.0 / (2.0 * std::sqrt(std::numbers::pi) * m);
  const double td = -phi6(pairs, m, b);
  if (!(td > 0.0) || !std::isfinite(td)) return fallback;
  const double alpha2 = 1.357 * std::pow(phi4(pairs, m, a) / td, 1.0 / 7.0);
  if (!std::isfinite(alpha2)) return fallback;

  auto equation = [&](double h) {
    const double sd_h = phi4(pairs, m, alpha2 * std::pow(h, 5.0 / 7.0));
    return std::pow(c1 / sd_h, 0.2) - h;
  };

  double lo = h_silverman / 100.0;
  double hi = h_silverman * 100.0;
  double f_lo = equation(lo);
  const double f_hi = equation(hi);
  if (!std::isfinite(f_lo) || !std::isfinite(f_hi) || f_lo * f_hi > 0.0) return fallback;
  while (hi - lo > 1e-8 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = equation(mid);
    if (!std::isfinite(f_mid)) return fallback;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), "sheather-jones", false};
}

DensityEstimate untransform_density(const DensityEstimate& root_estimate, int dim,
                                    std::span<const double> grid) {
  if (dim != 2 && dim != 3) {
    throw Error(ErrorCode::InputError, "dimension must be 2 or 3");
  }
  DensityEstimate out;
  out.grid.assign(grid.begin(), grid.end());
  out.values.resize(grid.size());
  out.bandwidth = root_estimate.bandwidth;
  out.sample_size = root_estimate.sample_size;
  out.transform = Transform::volume_scale;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double z = grid[i];
    if (dim == 2) {
      out.values[i] = root_estimate(z);
      continue;
    }
    if (!(z > 0.0)) {
      throw Error(ErrorCode::ZeroGridPoint, "volume-scale grid must exclude z = 0 in 3D");
    }
    const double r = std::sqrt(z);
    out.values[i] = root_estimate(r) / (2.0 * r);
  }
  return out;
}

StepCDF empirical_cdf(std::span<const double> x) {
  require_nonempty(x);
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  StepCDF out;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    out.locations.push_back(sorted[i]);
    out.cumulative.push_back(static_cast<double>(i + 1) / n);
  }
  out.cumulative.back() = 1.0;
  return out;
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
  double total = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    total += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  }
  return total;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::EmptySample, "KS statistic of an empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace section_lab
