#include "section_lab/sampler.hpp"

#include <cstdlib>
#include <string>

namespace section_lab {

int default_workers() {
  if (const char* env = std::getenv("SECTION_LAB_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w > 0) return w;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

SectionSample sample_iur_sections(const ConvexBody& body, std::size_t n, const RngStream& rng,
                                  const SamplerOptions& options) {
  return std::visit([&](const auto& b) { return sample_iur_sections(b, n, rng, options); }, body);
}

double acceptance_estimate(const SectionSample& sample) {
  if (sample.n_proposed == 0) {
    throw Error(ErrorCode::EmptySample, "sample has no proposals");
  }
  return static_cast<double>(sample.n_accepted) / static_cast<double>(sample.n_proposed);
}

}  // namespace section_lab
