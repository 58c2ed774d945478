#include "section_lab/stereology.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

namespace section_lab {

namespace {

constexpr double kPruneThreshold = 1e-12;

double standard_normal(RngStream& rng) {
  // Box-Muller; the second variate is discarded to keep draws stateless.
  const double u1 = rng.uniform_pos();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Marsaglia-Tsang, with the shape < 1 boost U^{1/k}.
double standard_gamma(double shape, RngStream& rng) {
  if (shape < 1.0) {
    return standard_gamma(shape + 1.0, rng) * std::pow(rng.uniform_pos(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

void require_step_positive(const StepCDF& cdf) {
  if (cdf.locations.empty()) {
    throw Error(ErrorCode::InputError, "step distribution has no atoms");
  }
  for (double x : cdf.locations) {
    if (!(x > 0.0)) {
      throw Error(ErrorCode::ZeroLocation, "step distribution has an atom at or below zero");
    }
  }
}

}  // namespace

SizeDistribution SizeDistribution::exponential(double rate) {
  if (!(rate > 0.0)) throw Error(ErrorCode::InputError, "rate must be positive");
  SizeDistribution h;
  h.kind_ = Kind::exponential;
  h.shape_ = 1.0;
  h.rate_ = rate;
  return h;
}

SizeDistribution SizeDistribution::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw Error(ErrorCode::InputError, "gamma shape and rate must be positive");
  }
  SizeDistribution h;
  h.kind_ = Kind::gamma;
  h.shape_ = shape;
  h.rate_ = rate;
  return h;
}

SizeDistribution SizeDistribution::point_mass(double location) {
  if (!(location > 0.0)) throw Error(ErrorCode::ZeroLocation, "point mass must sit at a positive size");
  SizeDistribution h;
  h.kind_ = Kind::point_mass;
  h.location_ = location;
  return h;
}

SizeDistribution SizeDistribution::step(StepCDF cdf) {
  require_step_positive(cdf);
  SizeDistribution h;
  h.kind_ = Kind::step;
  h.step_ = std::move(cdf);
  return h;
}

double SizeDistribution::mean() const {
  switch (kind_) {
    case Kind::exponential:
    case Kind::gamma: return shape_ / rate_;
    case Kind::point_mass: return location_;
    case Kind::step: {
      const std::vector<double> w = step_.weights();
      double m = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) m += w[j] * step_.locations[j];
      return m;
    }
  }
  return 0.0;
}

double SizeDistribution::cdf(double x) const {
  switch (kind_) {
    case Kind::exponential:
    case Kind::gamma: return x <= 0.0 ? 0.0 : boost::math::gamma_p(shape_, rate_ * x);
    case Kind::point_mass: return x >= location_ ? 1.0 : 0.0;
    case Kind::step: return step_(x);
  }
  return 0.0;
}

double SizeDistribution::sample(RngStream& rng) const {
  switch (kind_) {
    case Kind::exponential: return -std::log(rng.uniform_pos()) / rate_;
    case Kind::gamma: {
      if (shape_ == std::floor(shape_) && shape_ <= 16.0) {
        double prod = 1.0;
        for (int i = 0; i < static_cast<int>(shape_); ++i) prod *= rng.uniform_pos();
        return -std::log(prod) / rate_;
      }
      return standard_gamma(shape_, rng) / rate_;
    }
    case Kind::point_mass: return location_;
    case Kind::step: {
      const double u = rng.uniform();
      const auto it = std::upper_bound(step_.cumulative.begin(), step_.cumulative.end(), u);
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - step_.cumulative.begin()),
                                             step_.locations.size() - 1);
      return step_.locations[idx];
    }
  }
  return 0.0;
}

SizeDistribution length_biased(const SizeDistribution& h) {
  switch (h.kind()) {
    case SizeDistribution::Kind::exponential:
    case SizeDistribution::Kind::gamma:
      return SizeDistribution::gamma(h.shape() + 1.0, h.rate());
    case SizeDistribution::Kind::point_mass: return h;
    case SizeDistribution::Kind::step: {
      const StepCDF& cdf = h.step_cdf();
      require_step_positive(cdf);
      std::vector<double> w = cdf.weights();
      for (std::size_t j = 0; j < w.size(); ++j) w[j] *= cdf.locations[j];
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      if (!(total > 0.0) || !std::isfinite(total)) {
        throw Error(ErrorCode::InfiniteMean, "size distribution has no finite positive mean");
      }
      return SizeDistribution::step(StepCDF::from_weights(cdf.locations, std::move(w)));
    }
  }
  return h;
}

SizeDistribution unbias(const SizeDistribution& hb) {
  switch (hb.kind()) {
    case SizeDistribution::Kind::gamma:
      if (hb.shape() <= 1.0) {
        throw Error(ErrorCode::InputError, "gamma with shape <= 1 is not a length-biased law");
      }
      if (hb.shape() == 2.0) return SizeDistribution::exponential(hb.rate());
      return SizeDistribution::gamma(hb.shape() - 1.0, hb.rate());
    case SizeDistribution::Kind::exponential:
      throw Error(ErrorCode::InputError, "exponential is not a length-biased law");
    case SizeDistribution::Kind::point_mass: return hb;
    case SizeDistribution::Kind::step: {
      const StepCDF& cdf = hb.step_cdf();
      require_step_positive(cdf);
      std::vector<double> w = cdf.weights();
      for (std::size_t j = 0; j < w.size(); ++j) w[j] /= cdf.locations[j];
      return SizeDistribution::step(StepCDF::from_weights(cdf.locations, std::move(w)));
    }
  }
  return hb;
}

ReferenceDensity make_reference_density(const SectionSample& reference, std::size_t grid_points,
                                        int workers) {
  const std::vector<double> x = root_transform(reference);
  const Bandwidth bw = sheather_jones_bandwidth(x);
  const std::vector<double> grid = default_grid(x, bw.h, grid_points);
  auto est = std::make_shared<DensityEstimate>(reflection_kde(x, bw.h, grid, workers));
  ReferenceDensity out;
  out.support_max = est->grid.back();
  // Uniform grid: direct index instead of a search.
  out.pdf = [est](double z) {
    const auto& g = est->grid;
    const double step = g[1] - g[0];
    const double pos = (z - g.front()) / step;
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= g.size()) return lo + 1 == g.size() ? est->values.back() : 0.0;
    const double t = pos - static_cast<double>(lo);
    return est->values[lo] + t * (est->values[lo + 1] - est->values[lo]);
  };
  return out;
}

std::vector<double> sample_profile_sizes(const ConvexBody& body, const SizeDistribution& h,
                                         std::size_t n, const RngStream& rng,
                                         const SamplerOptions& options) {
  return std::visit([&](const auto& b) { return sample_profile_sizes(b, h, n, rng, options); },
                    body);
}

double log_likelihood(const StepCDF& hb, std::span<const double> s_obs,
                      const ReferenceDensity& gs) {
  if (s_obs.empty()) throw Error(ErrorCode::EmptySample, "no observations");
  require_step_positive(hb);
  const std::vector<double> w = hb.weights();
  double total = 0.0;
  for (double s : s_obs) {
    double mix = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] == 0.0) continue;
      const double lambda = hb.locations[j];
      mix += w[j] * gs(s / lambda) / lambda;
    }
    if (!(mix > 0.0)) {
      throw Error(ErrorCode::AllZeroLikelihood,
                  "an observation has zero density under every atom");
    }
    total += std::log(mix);
  }
  return total / static_cast<double>(s_obs.size());
}

NpmleResult npmle_em(std::span<const double> s_obs, const ReferenceDensity& gs, double tol,
                     std::size_t max_iter) {
  if (s_obs.empty()) throw Error(ErrorCode::EmptySample, "no observations");
  std::vector<double> s(s_obs.begin(), s_obs.end());
  if (!std::is_sorted(s.begin(), s.end())) std::sort(s.begin(), s.end());
  if (!(s.front() > 0.0)) throw Error(ErrorCode::ZeroLocation, "observations must be positive");

  // Support = distinct observations; equal observations share one atom.
  std::vector<double> atoms = s;
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  const auto n = static_cast<Eigen::Index>(s.size());
  const auto m = static_cast<Eigen::Index>(atoms.size());

  // k(i, j) = gS(s_i / x_j) / x_j, filled one row block at a time.
  Eigen::MatrixXd k(n, m);
  constexpr Eigen::Index kBlock = 256;
  for (Eigen::Index r0 = 0; r0 < n; r0 += kBlock) {
    const Eigen::Index r1 = std::min(n, r0 + kBlock);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double x = atoms[static_cast<std::size_t>(j)];
      for (Eigen::Index i = r0; i < r1; ++i) k(i, j) = gs(s[static_cast<std::size_t>(i)] / x) / x;
    }
  }

  Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  Eigen::VectorXd mix = k * w;
  if ((mix.array() <= 0.0).any()) {
    throw Error(ErrorCode::AllZeroLikelihood,
                "an observation has zero density under every support point");
  }
  auto loglik = [&](const Eigen::VectorXd& f) { return f.array().log().mean(); };

  NpmleResult result;
  result.tol = tol;
  double current = loglik(mix);
  result.loglik_trace.push_back(current);
  for (std::size_t it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd inv = mix.cwiseInverse();
    w = w.cwiseProduct(k.transpose() * inv) / static_cast<double>(n);
    w /= w.sum();
    mix = k * w;
    const double next = loglik(mix);
    result.loglik_trace.push_back(next);
    result.iterations = it + 1;
    const double gain = next - current;
    current = next;
    if (gain < tol) {
      result.converged = true;
      break;
    }
  }
  result.final_loglik = current;

  std::vector<double> kept_atoms;
  std::vector<double> kept_weights;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (w(j) < kPruneThreshold) {
      ++result.pruned_atoms;
      continue;
    }
    kept_atoms.push_back(atoms[static_cast<std::size_t>(j)]);
    kept_weights.push_back(w(j));
  }
  result.hb = StepCDF::from_weights(std::move(kept_atoms), std::move(kept_weights));
  return result;
}

}  // namespace section_lab
