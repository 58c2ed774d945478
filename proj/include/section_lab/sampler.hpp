#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "section_lab/geometry.hpp"
#include "section_lab/rng.hpp"

namespace section_lab {

/// A batch of section volumes Z_i ~ G_K plus rejection bookkeeping.
struct SectionSample {
  std::vector<double> values;
  std::uint64_t n_proposed = 0;
  std::uint64_t n_accepted = 0;
  std::uint64_t n_zero = 0;  // accepted sections of zero volume (measure-zero event)
  std::uint64_t seed = 0;
  std::string body_label;
  int dim = 0;
};

struct SamplerOptions {
  /// Worker threads. The output does not depend on this value: work is cut
  /// into fixed chunks, chunk c uses rng.substream(c) and results are
  /// concatenated in chunk order.
  int workers = 1;
  std::size_t chunk_size = std::size_t{1} << 16;
};

/// SECTION_LAB_WORKERS if set to a positive integer, else 1.
int default_workers();

/// Isotropic direction on S^{Dim-1}: angle Phi ~ U(0, 2pi) in 2D; in 3D
/// Phi ~ U(0, 2pi), X ~ U(-1, 1), Omega = arccos(X).
template <int Dim>
Direction<Dim> sample_direction(RngStream& rng) {
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  if constexpr (Dim == 2) {
    return Direction<2>(Point<2>(std::cos(phi), std::sin(phi)));
  } else {
    const double x = rng.uniform(-1.0, 1.0);
    const double sin_omega = std::sqrt(std::max(0.0, 1.0 - x * x));
    return Direction<3>(Point<3>(sin_omega * std::cos(phi), sin_omega * std::sin(phi), x));
  }
}

namespace detail {

template <class Body>
void validate_for_sampling(const Body& body) {
  const double v = volume(body);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidBody, "body has no interior");
  }
}

struct Chunk {
  std::vector<double> values;
  std::uint64_t proposed = 0;
  std::uint64_t zeros = 0;
};

/// Runs fill(chunk_index, count, chunk) for every chunk on `workers` threads.
template <class Fill>
std::vector<Chunk> run_chunks(std::size_t n, std::size_t chunk_size, int workers, Fill fill) {
  const std::size_t num_chunks = (n + chunk_size - 1) / chunk_size;
  std::vector<Chunk> chunks(num_chunks);
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t c = next++; c < num_chunks; c = next++) {
      const std::size_t count = std::min(chunk_size, n - c * chunk_size);
      fill(c, count, chunks[c]);
    }
  };
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(num_chunks)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return chunks;
}

inline void merge_chunks(std::vector<Chunk>&& chunks, SectionSample& out) {
  std::size_t total = 0;
  for (const auto& c : chunks) total += c.values.size();
  out.values.reserve(total);
  for (auto& c : chunks) {
    out.values.insert(out.values.end(), c.values.begin(), c.values.end());
    out.n_proposed += c.proposed;
    out.n_zero += c.zeros;
    std::vector<double>().swap(c.values);
  }
  out.n_accepted = out.values.size();
}

}  // namespace detail

/// Exactly n draws from G_K by rejection: enclose the centred body in the
/// ball of radius max_v |v - centroid|, propose an isotropic normal and an
/// offset S ~ U(0, R), accept when the plane meets the body.
template <class Body>
SectionSample sample_iur_sections(const Body& body, std::size_t n, const RngStream& rng,
                                  const SamplerOptions& options = {}) {
  constexpr int Dim = Body::dim;
  if (n < 1) {
    throw Error(ErrorCode::InputError, "sample size must be at least 1");
  }
  detail::validate_for_sampling(body);
  const Body k = centered(body);
  const double radius = enclosing_radius(k);

  auto fill = [&](std::size_t c, std::size_t count, detail::Chunk& chunk) {
    RngStream stream = rng.substream(c);
    chunk.values.reserve(count);
    while (chunk.values.size() < count) {
      const Direction<Dim> theta = sample_direction<Dim>(stream);
      const double s = radius * stream.uniform();
      ++chunk.proposed;
      if (s > support_interval(k, theta).b) {
        continue;
      }
      const double z = section_volume(k, Hyperplane<Dim>{theta, s});
      if (z == 0.0) ++chunk.zeros;
      chunk.values.push_back(z);
    }
  };

  SectionSample out;
  out.seed = rng.seed();
  out.dim = Dim;
  if constexpr (requires { body.label(); }) {
    out.body_label = body.label();
  } else {
    out.body_label = body.label;
  }
  detail::merge_chunks(detail::run_chunks(n, options.chunk_size, options.workers, fill), out);
  return out;
}

SectionSample sample_iur_sections(const ConvexBody& body, std::size_t n, const RngStream& rng,
                                  const SamplerOptions& options = {});

/// Fixed-orientation sections: S ~ U(a(theta), b(theta)), no rejection.
template <class Body>
SectionSample sample_fur_sections(const Body& body, const Direction<Body::dim>& theta,
                                  std::size_t n, const RngStream& rng,
                                  const SamplerOptions& options = {}) {
  constexpr int Dim = Body::dim;
  if (n < 1) {
    throw Error(ErrorCode::InputError, "sample size must be at least 1");
  }
  detail::validate_for_sampling(body);
  const IntervalSupport support = support_interval(body, theta);

  auto fill = [&](std::size_t c, std::size_t count, detail::Chunk& chunk) {
    RngStream stream = rng.substream(c);
    chunk.values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double s = stream.uniform(support.a, support.b);
      const double z = section_volume(body, Hyperplane<Dim>{theta, s});
      if (z == 0.0) ++chunk.zeros;
      chunk.values.push_back(z);
    }
    chunk.proposed = count;
  };

  SectionSample out;
  out.seed = rng.seed();
  out.dim = Dim;
  if constexpr (requires { body.label(); }) {
    out.body_label = body.label();
  } else {
    out.body_label = body.label;
  }
  detail::merge_chunks(detail::run_chunks(n, options.chunk_size, options.workers, fill), out);
  return out;
}

/// n_accepted / n_proposed. Throws EmptySample when nothing was proposed.
double acceptance_estimate(const SectionSample& sample);

}  // namespace section_lab
