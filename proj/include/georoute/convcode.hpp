#pragma once

#include <cstdint>
#include <vector>

#include "georoute/kernels.hpp"

// The K=7 (133,171) octal convolutional code, its punctured rate-3/4
// derivative, the transfer-function distance spectrum, and a hard-decision
// Viterbi decoder built on the ACS kernel.
namespace georoute {

enum class CodeRate { Half, ThreeQuarters };

inline constexpr int kConstraintLength = 7;
inline constexpr int kStates = 64;
inline constexpr unsigned kGenerator0 = 0133;
inline constexpr unsigned kGenerator1 = 0171;

struct Puncture {
  int period;
  // keep[phase][output] for the two generator outputs.
  bool keep[3][2];
};

Puncture puncture_pattern(CodeRate rate);
double code_rate_value(CodeRate rate);

struct DistanceSpectrum {
  int free_distance = 0;
  std::vector<int> distance;
  // Number of first-event error paths of each weight, per trellis step
  // (averaged over the puncturing phases).
  std::vector<double> multiplicity;
};

// The first `terms` non-zero spectrum lines.
DistanceSpectrum distance_spectrum(CodeRate rate, int terms = 10);

// Union bound on the first-event error probability per trellis step over a
// binary symmetric channel with crossover p.
kernels::UnionTerms union_terms(CodeRate rate);

// Zero-tailed encoding: appends K-1 flush bits, then punctures.
std::vector<std::uint8_t> encode(const std::vector<std::uint8_t>& info, CodeRate rate);

class ViterbiDecoder {
 public:
  explicit ViterbiDecoder(CodeRate rate, const kernels::Table& k = kernels::active());
  // `coded` holds the unpunctured hard bits in transmission order; returns
  // `info_bits` decoded bits (tail stripped).
  std::vector<std::uint8_t> decode(const std::vector<std::uint8_t>& coded, std::size_t info_bits);

 private:
  CodeRate rate_;
  const kernels::Table& k_;
  // Branch metric tables indexed by (r0, r1, keep0, keep1).
  alignas(32) std::uint16_t bm_[16][32];
  std::vector<std::uint64_t> decisions_;
};

}  // namespace georoute
