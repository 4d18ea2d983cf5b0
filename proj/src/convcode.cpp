#include "georoute/convcode.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace georoute {

namespace {

inline unsigned parity(unsigned v) { return static_cast<unsigned>(std::popcount(v) & 1); }

// State holds the previous six inputs, newest in bit 5.
inline unsigned next_state(unsigned s, unsigned b) { return (s >> 1) | (b << 5); }

inline void outputs(unsigned s, unsigned b, unsigned& o0, unsigned& o1) {
  unsigned reg = (b << 6) | s;
  o0 = parity(reg & kGenerator0);
  o1 = parity(reg & kGenerator1);
}

}  // namespace

Puncture puncture_pattern(CodeRate rate) {
  if (rate == CodeRate::Half) return Puncture{1, {{true, true}, {true, true}, {true, true}}};
  // 802.11a-style rate 3/4: keep A1B1 A2 B3
  return Puncture{3, {{true, true}, {true, false}, {false, true}}};
}

double code_rate_value(CodeRate rate) { return rate == CodeRate::Half ? 0.5 : 0.75; }

DistanceSpectrum distance_spectrum(CodeRate rate, int terms) {
  const Puncture pp = puncture_pattern(rate);
  const int max_weight = 60;
  const int max_steps = 200;
  std::vector<double> total(max_weight + 1, 0.0);

  for (int start = 0; start < pp.period; ++start) {
    // paths[state][weight] for paths that left state 0 and have not returned
    std::vector<std::vector<double>> paths(kStates, std::vector<double>(max_weight + 1, 0.0));
    unsigned o0, o1;
    outputs(0, 1, o0, o1);
    int w0 = (pp.keep[start][0] ? o0 : 0) + (pp.keep[start][1] ? o1 : 0);
    paths[next_state(0, 1)][w0] = 1.0;
    for (int step = 1; step < max_steps; ++step) {
      int phase = (start + step) % pp.period;
      std::vector<std::vector<double>> next(kStates, std::vector<double>(max_weight + 1, 0.0));
      bool alive = false;
      for (unsigned s = 1; s < kStates; ++s) {
        for (int w = 0; w <= max_weight; ++w) {
          double c = paths[s][w];
          if (c == 0.0) continue;
          for (unsigned b = 0; b < 2; ++b) {
            outputs(s, b, o0, o1);
            int nw = w + (pp.keep[phase][0] ? o0 : 0) + (pp.keep[phase][1] ? o1 : 0);
            if (nw > max_weight) continue;
            unsigned ns = next_state(s, b);
            if (ns == 0) {
              total[nw] += c;
            } else {
              next[ns][nw] += c;
              alive = true;
            }
          }
        }
      }
      paths.swap(next);
      if (!alive) break;
    }
  }

  DistanceSpectrum spec;
  for (int w = 1; w <= max_weight && static_cast<int>(spec.distance.size()) < terms; ++w) {
    if (total[w] == 0.0) continue;
    spec.distance.push_back(w);
    spec.multiplicity.push_back(total[w] / pp.period);
  }
  if (spec.distance.empty()) throw std::logic_error("empty distance spectrum");
  spec.free_distance = spec.distance.front();
  return spec;
}

kernels::UnionTerms union_terms(CodeRate rate) {
  // The spectrum walk is the slow part; both rates are cached.
  static const DistanceSpectrum half = distance_spectrum(CodeRate::Half);
  static const DistanceSpectrum three_quarters = distance_spectrum(CodeRate::ThreeQuarters);
  const DistanceSpectrum& s = rate == CodeRate::Half ? half : three_quarters;
  kernels::UnionTerms t;
  t.count = static_cast<int>(s.distance.size());
  for (int i = 0; i < t.count; ++i) {
    t.distance[i] = s.distance[i];
    t.weight[i] = s.multiplicity[i];
  }
  kernels::prepare_union_terms(t);
  return t;
}

std::vector<std::uint8_t> encode(const std::vector<std::uint8_t>& info, CodeRate rate) {
  const Puncture pp = puncture_pattern(rate);
  std::vector<std::uint8_t> out;
  out.reserve(2 * (info.size() + kConstraintLength));
  unsigned s = 0;
  std::size_t steps = info.size() + kConstraintLength - 1;
  for (std::size_t t = 0; t < steps; ++t) {
    unsigned b = t < info.size() ? (info[t] & 1u) : 0u;
    unsigned o0, o1;
    outputs(s, b, o0, o1);
    int phase = static_cast<int>(t % pp.period);
    if (pp.keep[phase][0]) out.push_back(static_cast<std::uint8_t>(o0));
    if (pp.keep[phase][1]) out.push_back(static_cast<std::uint8_t>(o1));
    s = next_state(s, b);
  }
  return out;
}

ViterbiDecoder::ViterbiDecoder(CodeRate rate, const kernels::Table& k) : rate_(rate), k_(k) {
  for (int idx = 0; idx < 16; ++idx) {
    unsigned r0 = idx & 1, r1 = (idx >> 1) & 1, k0 = (idx >> 2) & 1, k1 = (idx >> 3) & 1;
    for (unsigned j = 0; j < 32; ++j) {
      unsigned e0, e1;
      outputs(2 * j, 0, e0, e1);
      bm_[idx][j] = static_cast<std::uint16_t>(k0 * (r0 ^ e0) + k1 * (r1 ^ e1));
    }
  }
}

std::vector<std::uint8_t> ViterbiDecoder::decode(const std::vector<std::uint8_t>& coded,
                                                 std::size_t info_bits) {
  const Puncture pp = puncture_pattern(rate_);
  const std::size_t steps = info_bits + kConstraintLength - 1;
  decisions_.assign(steps, 0);

  alignas(32) std::uint16_t metric[2][kStates];
  std::fill(std::begin(metric[0]), std::end(metric[0]), std::uint16_t{4096});
  metric[0][0] = 0;
  int cur = 0;
  std::size_t pos = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    int phase = static_cast<int>(t % pp.period);
    unsigned k0 = pp.keep[phase][0], k1 = pp.keep[phase][1];
    unsigned r0 = 0, r1 = 0;
    if (k0) r0 = pos < coded.size() ? coded[pos++] & 1u : 0u;
    if (k1) r1 = pos < coded.size() ? coded[pos++] & 1u : 0u;
    unsigned idx = r0 | (r1 << 1) | (k0 << 2) | (k1 << 3);
    k_.acs64(metric[cur], metric[cur ^ 1], &decisions_[t], bm_[idx],
             static_cast<std::uint16_t>(k0 + k1));
    cur ^= 1;
    if ((t & 63) == 63) {
      std::uint16_t lo = *std::min_element(std::begin(metric[cur]), std::end(metric[cur]));
      for (auto& m : metric[cur]) m = static_cast<std::uint16_t>(m - lo);
    }
  }

  std::vector<std::uint8_t> bits(steps);
  unsigned state = 0;  // the tail drives the encoder back to zero
  for (std::size_t t = steps; t-- > 0;) {
    bits[t] = static_cast<std::uint8_t>(state >> 5);
    unsigned odd = static_cast<unsigned>((decisions_[t] >> state) & 1u);
    state = ((state & 31u) << 1) | odd;
  }
  bits.resize(info_bits);
  return bits;
}

}  // namespace georoute
