#include <doctest.h>

#include <set>

#include "georoute/rng.hpp"

using georoute::Philox;
using georoute::Stream;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  auto zero = Philox::block({0, 0, 0, 0}, {0, 0});
  CHECK(zero == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  auto ones = Philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(ones == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  auto pi = Philox::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(pi == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
  Philox a(42, Stream::Field, 7), b(42, Stream::Field, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  std::set<std::uint64_t> firsts;
  for (auto s : {Stream::Field, Stream::Awake, Stream::Splitting, Stream::Offsets})
    for (std::uint64_t trial = 0; trial < 4; ++trial) firsts.insert(Philox(42, s, trial).next_u64());
  firsts.insert(Philox(43, Stream::Field, 0).next_u64());
  CHECK(firsts.size() == 17);
}

TEST_CASE("uniform, below and poisson stay in range") {
  Philox r(1, Stream::Oracle);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(7) < 7u);
    CHECK(r.uniform_pos() > 0.0);
    sum += static_cast<double>(r.poisson(40.0));
  }
  CHECK(sum / 20000 == doctest::Approx(40.0).epsilon(0.01));
}
