#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

// Hot loops with a portable scalar reference and an AVX2 variant. The active
// table is picked once at startup from CPUID; GEOROUTE_ISA=scalar forces the
// reference path. Both variants perform the same floating-point operations in
// the same order, so results are bit-identical.
namespace georoute::kernels {

enum class Isa { Scalar, Avx2 };

inline constexpr int kMaxUnionTerms = 16;
inline constexpr int kMaxDistance = 48;

// Pairwise-error union bound sum_t weight[t] * P_{distance[t]}(p) for a
// hard-decision binary symmetric channel with crossover p.
struct UnionTerms {
  int count = 0;
  int distance[kMaxUnionTerms] = {};
  double weight[kMaxUnionTerms] = {};
  // binom[d][k] = C(d, k), filled by prepare_union_terms.
  double binom[kMaxDistance + 1][kMaxDistance + 1] = {};
};

void prepare_union_terms(UnionTerms& t);

struct Table {
  // out[i] = d - |(xs[i], ys[i]) - (dest_x, dest_y)|
  void (*progress)(const double* xs, const double* ys, std::size_t n, double dest_x,
                   double dest_y, double d, double* out);

  // One add-compare-select step of a 64-state rate-1/2 trellis whose
  // generators have both end taps set. bm[j] is the branch metric of input 0
  // leaving state 2j; the complementary branch costs bmax - bm[j]. Bit s of
  // *decision is set when the odd predecessor survives into state s.
  void (*acs64)(const std::uint16_t* in, std::uint16_t* out, std::uint64_t* decision,
                const std::uint16_t* bm, std::uint16_t bmax);

  void (*union_bound)(const double* p, std::size_t n, const UnionTerms& terms, double* out);
};

const Table& scalar_table();
// Null when the binary was built without AVX2 support.
const Table* avx2_table();

Isa detected_isa();
const Table& active();
std::string_view isa_name(Isa isa);

}  // namespace georoute::kernels
