#include <doctest.h>

#include <cstring>
#include <vector>

#include "georoute/convcode.hpp"
#include "georoute/kernels.hpp"
#include "georoute/rng.hpp"

using namespace georoute;
namespace k = georoute::kernels;

TEST_CASE("active table matches the detected ISA") {
  const k::Table* avx = k::avx2_table();
  if (k::detected_isa() == k::Isa::Avx2) REQUIRE(avx != nullptr);
  CHECK(!k::isa_name(k::detected_isa()).empty());
}

TEST_CASE("AVX2 kernels are bit-identical to the scalar reference") {
  const k::Table* avx = k::avx2_table();
  if (!avx || k::detected_isa() != k::Isa::Avx2) {
    MESSAGE("AVX2 not available on this machine; equivalence not exercised");
    return;
  }
  const k::Table& ref = k::scalar_table();
  Philox rng(3, Stream::Oracle);

  SUBCASE("progress") {
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 1000u}) {
      std::vector<double> xs(n), ys(n), a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        xs[i] = 10.0 * rng.uniform() - 5.0;
        ys[i] = 10.0 * rng.uniform() - 5.0;
      }
      ref.progress(xs.data(), ys.data(), n, 37.5, 0.25, 37.5, a.data());
      avx->progress(xs.data(), ys.data(), n, 37.5, 0.25, 37.5, b.data());
      CHECK(std::memcmp(a.data(), b.data(), n * sizeof(double)) == 0);
    }
  }

  SUBCASE("union bound") {
    for (CodeRate rate : {CodeRate::Half, CodeRate::ThreeQuarters}) {
      k::UnionTerms terms = union_terms(rate);
      std::vector<double> p(259), a(259), b(259);
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = 0.5 * rng.uniform() * rng.uniform();
      p[0] = 0.0;
      p[1] = 0.5;
      ref.union_bound(p.data(), p.size(), terms, a.data());
      avx->union_bound(p.data(), p.size(), terms, b.data());
      CHECK(std::memcmp(a.data(), b.data(), p.size() * sizeof(double)) == 0);
    }
  }

  SUBCASE("add-compare-select") {
    alignas(32) std::uint16_t in[64], out_a[64], out_b[64], bm[32];
    for (int trial = 0; trial < 200; ++trial) {
      for (auto& v : in) v = static_cast<std::uint16_t>(rng.below(300));
      std::uint16_t bmax = static_cast<std::uint16_t>(rng.below(3));
      for (auto& v : bm) v = static_cast<std::uint16_t>(rng.below(bmax + 1u));
      std::uint64_t da = 0, db = 0;
      ref.acs64(in, out_a, &da, bm, bmax);
      avx->acs64(in, out_b, &db, bm, bmax);
      CHECK(std::memcmp(out_a, out_b, sizeof(out_a)) == 0);
      CHECK(da == db);
    }
  }
}

TEST_CASE("Viterbi decodes identically with either kernel table") {
  const k::Table* avx = k::avx2_table();
  if (!avx || k::detected_isa() != k::Isa::Avx2) return;
  Philox rng(9, Stream::Oracle);
  std::vector<std::uint8_t> info(500);
  for (auto& b : info) b = static_cast<std::uint8_t>(rng.next_u32() & 1u);
  auto coded = encode(info, CodeRate::Half);
  for (std::size_t i = 0; i < coded.size(); ++i)
    if (rng.bernoulli(0.04)) coded[i] ^= 1u;
  ViterbiDecoder a(CodeRate::Half, k::scalar_table()), b(CodeRate::Half, *avx);
  CHECK(a.decode(coded, info.size()) == b.decode(coded, info.size()));
}
