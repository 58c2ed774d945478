#include "section_lab/validation.hpp"

namespace section_lab::validation {

double inclusion_excess(const std::vector<double>& sample_k, const std::vector<double>& sample_l,
                        double width_ratio, const std::vector<double>& grid) {
  const StepCDF gk = empirical_cdf(sample_k);
  const StepCDF gl = empirical_cdf(sample_l);
  double worst = -1.0;
  for (double z : grid) {
    worst = std::max(worst, gl(z) - (gk(z) * width_ratio + (1.0 - width_ratio)));
  }
  return worst;
}

}  // namespace section_lab::validation
