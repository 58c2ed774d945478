#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "section_lab/density.hpp"
#include "section_lab/geometry.hpp"
#include "section_lab/rng.hpp"
#include "section_lab/sampler.hpp"

namespace section_lab {

/// Particle size law H on (0, inf).
class SizeDistribution {
 public:
  enum class Kind { exponential, gamma, point_mass, step };

  static SizeDistribution exponential(double rate);
  static SizeDistribution gamma(double shape, double rate);
  static SizeDistribution point_mass(double location);
  static SizeDistribution step(StepCDF cdf);

  Kind kind() const noexcept { return kind_; }
  double shape() const noexcept { return shape_; }
  double rate() const noexcept { return rate_; }
  double location() const noexcept { return location_; }
  const StepCDF& step_cdf() const noexcept { return step_; }

  double mean() const;
  double cdf(double x) const;
  double sample(RngStream& rng) const;

 private:
  Kind kind_ = Kind::point_mass;
  double shape_ = 1.0;
  double rate_ = 1.0;
  double location_ = 1.0;
  StepCDF step_;
};

/// H^b(x) = int_0^x t dH(t) / int_0^inf t dH(t). Exp(r) maps to Gamma(2, r),
/// Gamma(k, r) to Gamma(k + 1, r); step weights w_j become w_j x_j / sum.
SizeDistribution length_biased(const SizeDistribution& h);

/// Inverse of length_biased: step weights w_j become (w_j / x_j) / sum,
/// Gamma(k, r) with k > 1 maps back to Gamma(k - 1, r).
SizeDistribution unbias(const SizeDistribution& hb);

/// g_K^S of the unit-size reference particle, zero outside (0, support_max).
struct ReferenceDensity {
  std::function<double(double)> pdf;
  double support_max = 0.0;

  double operator()(double x) const {
    if (!(x > 0.0) || x >= support_max) return 0.0;
    return pdf(x);
  }
};

/// Reflection KDE of the root-transformed reference sample with
/// Sheather-Jones bandwidth, linearly interpolated. The support bound is the
/// end of the evaluation grid, max(X) + 4h.
ReferenceDensity make_reference_density(const SectionSample& reference,
                                        std::size_t grid_points = 2048, int workers = 1);

/// S_i = L_i X_i with L_i ~ length_biased(h) and X_i the root-transformed
/// volume of a fresh IUR section of `body`.
template <class Body>
std::vector<double> sample_profile_sizes(const Body& body, const SizeDistribution& h,
                                         std::size_t n, const RngStream& rng,
                                         const SamplerOptions& options = {}) {
  const SectionSample sections = sample_iur_sections(body, n, rng.substream(0), options);
  std::vector<double> s = root_transform(sections);
  const SizeDistribution hb = length_biased(h);
  RngStream sizes = rng.substream(1);
  for (double& v : s) v *= hb.sample(sizes);
  return s;
}

std::vector<double> sample_profile_sizes(const ConvexBody& body, const SizeDistribution& h,
                                         std::size_t n, const RngStream& rng,
                                         const SamplerOptions& options = {});

/// (1/N) sum_i log sum_j w_j gS(s_i / x_j) / x_j.
double log_likelihood(const StepCDF& hb, std::span<const double> s_obs,
                      const ReferenceDensity& gs);

struct NpmleResult {
  StepCDF hb;
  std::size_t iterations = 0;
  double final_loglik = 0.0;
  bool converged = false;
  double tol = 0.0;
  std::size_t pruned_atoms = 0;
  std::vector<double> loglik_trace;  // log-likelihood before each update, then the final value
};

/// Nonparametric MLE of H^b over step CDFs jumping only at the observations,
/// by EM on the mixture weights from a uniform start. Stops when the
/// log-likelihood gain drops below `tol` or after `max_iter` updates; atoms
/// below 1e-12 are pruned at the end.
NpmleResult npmle_em(std::span<const double> s_obs, const ReferenceDensity& gs,
                     double tol = 1e-8, std::size_t max_iter = 5000);

}  // namespace section_lab
