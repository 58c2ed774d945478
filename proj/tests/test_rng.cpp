#include <doctest.h>

#include <cmath>
#include <set>

#include "section_lab/rng.hpp"

using section_lab::philox4x32;
using section_lab::RngStream;

// Random123 known-answer vectors for Philox4x32-10.
TEST_CASE("philox known answers") {
  using A = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, 3);
  RngStream b(42, 3);
  RngStream c(42, 4);
  RngStream d(43, 3);
  int same_c = 0;
  int same_d = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    CHECK(x == b());
    same_c += x == c();
    same_d += x == d();
  }
  CHECK(same_c < 3);
  CHECK(same_d < 3);
  CHECK(a.blocks_used() == 250);
}

TEST_CASE("substreams") {
  const RngStream parent(1, 0);
  std::set<std::uint32_t> firsts;
  for (std::uint64_t i = 0; i < 100; ++i) {
    RngStream s = parent.substream(i);
    RngStream again = parent.substream(i);
    const auto x = s();
    CHECK(x == again());
    firsts.insert(x);
  }
  CHECK(firsts.size() == 100);
  RngStream other = RngStream(1, 1).substream(0);
  RngStream mine = parent.substream(0);
  CHECK(other() != mine());
}

TEST_CASE("uniform draws") {
  RngStream rng(9, 0);
  double sum = 0.0;
  double sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum2 += u * u;
    const double p = rng.uniform_pos();
    REQUIRE(p > 0.0);
    REQUIRE(p <= 1.0);
  }
  // mean 1/2 and variance 1/12 within 6 standard errors
  CHECK(std::abs(sum / n - 0.5) < 6.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sum2 / n - sum * sum / n / n - 1.0 / 12.0) < 2e-3);
  const double v = rng.uniform(2.0, 3.0);
  CHECK(v >= 2.0);
  CHECK(v < 3.0);
}
