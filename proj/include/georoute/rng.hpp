#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace georoute {

// Independent random streams are addressed by (seed, purpose, trial). Two
// streams that differ in any coordinate never share a counter block.
enum class Stream : std::uint32_t {
  Field = 1,       // node placement
  Awake = 2,       // sleep schedule resampling
  Splitting = 3,   // GeRaF collision resolution coin flips
  Offsets = 4,     // BOSS random slot offsets
  HopCount = 5,    // hop-count estimator
  BitLevel = 6,    // encoder / channel / decoder oracle
  Oracle = 7,      // standalone Monte Carlo checks
};

// Philox4x32-10 (Salmon et al., SC'11). The key carries the seed, the
// counter carries (block index, trial, purpose).
class Philox {
 public:
  Philox(std::uint64_t seed, Stream purpose, std::uint64_t trial = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        ctr_{0, 0, static_cast<std::uint32_t>(trial),
             (static_cast<std::uint32_t>(trial >> 32) & 0x00FFFFFFu) |
                 (static_cast<std::uint32_t>(purpose) << 24)} {}

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // (0, 1], safe to take the logarithm of.
  double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  double exponential() { return -std::log(uniform_pos()); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    double t = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Inversion in chunks of mean <= 16 so that exp(-mean) never underflows.
  std::uint64_t poisson(double mean) {
    std::uint64_t total = 0;
    while (mean > 16.0) {
      total += poisson_small(16.0);
      mean -= 16.0;
    }
    return total + poisson_small(mean);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t poisson_small(double mean) {
    if (mean <= 0.0) return 0;
    double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u >= cdf && k < 1000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

  void refill() {
    buf_ = block(ctr_, key_);
    pos_ = 0;
    if (++ctr_[0] == 0) ++ctr_[1];
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;

 public:
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> c,
                                            std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
      std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * c[0];
      std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * c[2];
      std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
      k[0] += 0x9E3779B9u;
      k[1] += 0xBB67AE85u;
    }
    return c;
  }
};

}  // namespace georoute
