#include <doctest.h>

#include "georoute/convcode.hpp"
#include "georoute/rng.hpp"

using namespace georoute;

TEST_CASE("free distances of the mother and punctured codes") {
  auto half = distance_spectrum(CodeRate::Half);
  CHECK(half.free_distance == 10);
  REQUIRE(half.multiplicity.size() >= 3);
  // a_d of the (133,171) code: 11, 0, 38, 0, 193 for d = 10..14
  CHECK(half.distance[0] == 10);
  CHECK(half.multiplicity[0] == doctest::Approx(11.0));
  CHECK(half.distance[1] == 12);
  CHECK(half.multiplicity[1] == doctest::Approx(38.0));
  auto tq = distance_spectrum(CodeRate::ThreeQuarters);
  CHECK(tq.free_distance == 5);
  CHECK(code_rate_value(CodeRate::ThreeQuarters) == doctest::Approx(0.75));
}

TEST_CASE("encode then decode round trips on a clean channel") {
  Philox rng(5, Stream::Oracle);
  for (CodeRate rate : {CodeRate::Half, CodeRate::ThreeQuarters}) {
    for (std::size_t n : {1u, 7u, 88u, 1000u}) {
      std::vector<std::uint8_t> info(n);
      for (auto& b : info) b = static_cast<std::uint8_t>(rng.next_u32() & 1u);
      auto coded = encode(info, rate);
      if (rate == CodeRate::Half) CHECK(coded.size() == 2 * (n + kConstraintLength - 1));
      ViterbiDecoder dec(rate);
      CHECK(dec.decode(coded, n) == info);
    }
  }
}

TEST_CASE("hard-decision Viterbi corrects isolated errors") {
  Philox rng(6, Stream::Oracle);
  std::vector<std::uint8_t> info(400);
  for (auto& b : info) b = static_cast<std::uint8_t>(rng.next_u32() & 1u);
  auto coded = encode(info, CodeRate::Half);
  // four errors spread far apart are within the correction radius locally
  for (std::size_t pos : {20u, 220u, 420u, 620u}) coded[pos] ^= 1u;
  ViterbiDecoder dec(CodeRate::Half);
  CHECK(dec.decode(coded, info.size()) == info);
}

TEST_CASE("union bound terms follow the spectrum") {
  auto t = union_terms(CodeRate::Half);
  CHECK(t.count == 10);
  CHECK(t.distance[0] == 10);
  CHECK(t.binom[10][5] == doctest::Approx(252.0));
}
