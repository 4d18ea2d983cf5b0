#include <immintrin.h>

#include <cmath>

#include "georoute/kernels.hpp"

namespace georoute::kernels {

namespace {

void progress_avx2(const double* xs, const double* ys, std::size_t n, double dest_x,
                   double dest_y, double d, double* out) {
  const __m256d vx = _mm256_set1_pd(dest_x);
  const __m256d vy = _mm256_set1_pd(dest_y);
  const __m256d vd = _mm256_set1_pd(d);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vx);
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vy);
    __m256d r2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(vd, _mm256_sqrt_pd(r2)));
  }
  for (; i < n; ++i) {
    double dx = xs[i] - dest_x;
    double dy = ys[i] - dest_y;
    out[i] = d - std::sqrt(dx * dx + dy * dy);
  }
}

// Gathers the even (or odd) 16-bit lanes of 32 consecutive metrics.
inline __m256i deinterleave(__m256i a, __m256i b, bool odd) {
  if (odd) {
    a = _mm256_srli_epi32(a, 16);
    b = _mm256_srli_epi32(b, 16);
  } else {
    const __m256i lo = _mm256_set1_epi32(0xFFFF);
    a = _mm256_and_si256(a, lo);
    b = _mm256_and_si256(b, lo);
  }
  return _mm256_permute4x64_epi64(_mm256_packus_epi32(a, b), 0xD8);
}

inline std::uint32_t pack_mask(__m256i lo, __m256i hi) {
  __m256i bytes = _mm256_permute4x64_epi64(_mm256_packs_epi16(lo, hi), 0xD8);
  return static_cast<std::uint32_t>(_mm256_movemask_epi8(bytes));
}

void acs64_avx2(const std::uint16_t* in, std::uint16_t* out, std::uint64_t* decision,
                const std::uint16_t* bm, std::uint16_t bmax) {
  const __m256i* src = reinterpret_cast<const __m256i*>(in);
  const __m256i v[4] = {_mm256_loadu_si256(src + 0), _mm256_loadu_si256(src + 1),
                        _mm256_loadu_si256(src + 2), _mm256_loadu_si256(src + 3)};
  const __m256i ones = _mm256_set1_epi16(-1);
  const __m256i vmax = _mm256_set1_epi16(static_cast<short>(bmax));
  __m256i* dst = reinterpret_cast<__m256i*>(out);
  __m256i take_lo[2], take_hi[2];

  // Half h covers butterflies j = 16h .. 16h+15.
  for (int h = 0; h < 2; ++h) {
    __m256i even = deinterleave(v[2 * h], v[2 * h + 1], false);
    __m256i odd = deinterleave(v[2 * h], v[2 * h + 1], true);
    __m256i m = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bm + 16 * h));
    __m256i mc = _mm256_sub_epi16(vmax, m);

    __m256i a0 = _mm256_add_epi16(even, m);
    __m256i a1 = _mm256_add_epi16(odd, mc);
    __m256i amin = _mm256_min_epu16(a0, a1);
    take_lo[h] = _mm256_xor_si256(_mm256_cmpeq_epi16(amin, a0), ones);
    _mm256_storeu_si256(dst + h, amin);

    __m256i b0 = _mm256_add_epi16(even, mc);
    __m256i b1 = _mm256_add_epi16(odd, m);
    __m256i bmin = _mm256_min_epu16(b0, b1);
    take_hi[h] = _mm256_xor_si256(_mm256_cmpeq_epi16(bmin, b0), ones);
    _mm256_storeu_si256(dst + 2 + h, bmin);
  }
  std::uint64_t lo = pack_mask(take_lo[0], take_lo[1]);
  std::uint64_t hi = pack_mask(take_hi[0], take_hi[1]);
  *decision = lo | (hi << 32);
}

void union_bound_avx2(const double* p, std::size_t n, const UnionTerms& terms, double* out) {
  int dmax = 0;
  for (int t = 0; t < terms.count; ++t) dmax = terms.distance[t] > dmax ? terms.distance[t] : dmax;
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  __m256d pw[kMaxDistance + 1];
  __m256d qw[kMaxDistance + 1];
  for (std::size_t i = 0; i < n; i += 4) {
    alignas(32) double lane[4] = {0.25, 0.25, 0.25, 0.25};
    std::size_t width = n - i < 4 ? n - i : 4;
    for (std::size_t k = 0; k < width; ++k) lane[k] = p[i + k];
    __m256d vp = _mm256_load_pd(lane);
    __m256d vq = _mm256_sub_pd(one, vp);
    pw[0] = one;
    qw[0] = one;
    for (int k = 1; k <= dmax; ++k) {
      pw[k] = _mm256_mul_pd(pw[k - 1], vp);
      qw[k] = _mm256_mul_pd(qw[k - 1], vq);
    }
    __m256d acc = _mm256_setzero_pd();
    for (int t = 0; t < terms.count; ++t) {
      int d = terms.distance[t];
      __m256d s = _mm256_setzero_pd();
      for (int k = d / 2 + 1; k <= d; ++k) {
        __m256d c = _mm256_set1_pd(terms.binom[d][k]);
        s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_mul_pd(c, pw[k]), qw[d - k]));
      }
      if (d % 2 == 0) {
        __m256d c = _mm256_set1_pd(terms.binom[d][d / 2]);
        __m256d tie = _mm256_mul_pd(_mm256_mul_pd(_mm256_mul_pd(half, c), pw[d / 2]), qw[d / 2]);
        s = _mm256_add_pd(s, tie);
      }
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(terms.weight[t]), s));
    }
    _mm256_store_pd(lane, acc);
    for (std::size_t k = 0; k < width; ++k) out[i + k] = lane[k];
  }
}

}  // namespace

const Table& avx2_table_impl() {
  static const Table t{progress_avx2, acs64_avx2, union_bound_avx2};
  return t;
}

}  // namespace georoute::kernels
