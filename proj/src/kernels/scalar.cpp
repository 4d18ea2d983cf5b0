#include "georoute/kernels.hpp"

#include <cmath>

namespace georoute::kernels {

void prepare_union_terms(UnionTerms& t) {
  for (int d = 0; d <= kMaxDistance; ++d) {
    t.binom[d][0] = 1.0;
    for (int k = 1; k <= d; ++k) t.binom[d][k] = t.binom[d][k - 1] * (d - k + 1) / k;
  }
}

namespace {

void progress_scalar(const double* xs, const double* ys, std::size_t n, double dest_x,
                     double dest_y, double d, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double dx = xs[i] - dest_x;
    double dy = ys[i] - dest_y;
    out[i] = d - std::sqrt(dx * dx + dy * dy);
  }
}

void acs64_scalar(const std::uint16_t* in, std::uint16_t* out, std::uint64_t* decision,
                  const std::uint16_t* bm, std::uint16_t bmax) {
  std::uint64_t dec = 0;
  for (int j = 0; j < 32; ++j) {
    std::uint16_t m = bm[j];
    std::uint16_t mc = static_cast<std::uint16_t>(bmax - m);
    std::uint16_t even = in[2 * j];
    std::uint16_t odd = in[2 * j + 1];

    std::uint16_t a0 = static_cast<std::uint16_t>(even + m);
    std::uint16_t a1 = static_cast<std::uint16_t>(odd + mc);
    if (a1 < a0) {
      out[j] = a1;
      dec |= std::uint64_t{1} << j;
    } else {
      out[j] = a0;
    }

    std::uint16_t b0 = static_cast<std::uint16_t>(even + mc);
    std::uint16_t b1 = static_cast<std::uint16_t>(odd + m);
    if (b1 < b0) {
      out[j + 32] = b1;
      dec |= std::uint64_t{1} << (j + 32);
    } else {
      out[j + 32] = b0;
    }
  }
  *decision = dec;
}

void union_bound_scalar(const double* p, std::size_t n, const UnionTerms& terms, double* out) {
  int dmax = 0;
  for (int t = 0; t < terms.count; ++t) dmax = terms.distance[t] > dmax ? terms.distance[t] : dmax;
  double pw[kMaxDistance + 1];
  double qw[kMaxDistance + 1];
  for (std::size_t i = 0; i < n; ++i) {
    double q = 1.0 - p[i];
    pw[0] = 1.0;
    qw[0] = 1.0;
    for (int k = 1; k <= dmax; ++k) {
      pw[k] = pw[k - 1] * p[i];
      qw[k] = qw[k - 1] * q;
    }
    double acc = 0.0;
    for (int t = 0; t < terms.count; ++t) {
      int d = terms.distance[t];
      double s = 0.0;
      for (int k = d / 2 + 1; k <= d; ++k) s = s + terms.binom[d][k] * pw[k] * qw[d - k];
      if (d % 2 == 0) s = s + 0.5 * terms.binom[d][d / 2] * pw[d / 2] * qw[d / 2];
      acc = acc + terms.weight[t] * s;
    }
    out[i] = acc;
  }
}

}  // namespace

const Table& scalar_table() {
  static const Table t{progress_scalar, acs64_scalar, union_bound_scalar};
  return t;
}

}  // namespace georoute::kernels
