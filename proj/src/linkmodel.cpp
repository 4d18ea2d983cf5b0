#include "georoute/linkmodel.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>

namespace georoute {

int McsProfile::coded_bits_per_symbol() const {
  switch (modulation) {
    case Modulation::Qpsk: return 2;
    case Modulation::Qam16: return 4;
    case Modulation::Qam64: return 6;
  }
  return 2;
}

double McsProfile::info_bits_per_symbol() const {
  return coded_bits_per_symbol() * code_rate_value(code_rate);
}

std::string McsProfile::name() const {
  std::string m = modulation == Modulation::Qpsk ? "QPSK" : modulation == Modulation::Qam16 ? "16QAM" : "64QAM";
  return m + (code_rate == CodeRate::Half ? "-1/2" : "-3/4");
}

McsProfile McsProfile::parse(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (c != '-' && c != '_' && c != ' ') s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  McsProfile p;
  std::string rate;
  auto starts = [&](std::string_view prefix) { return s.rfind(prefix, 0) == 0; };
  if (starts("QPSK")) {
    p.modulation = Modulation::Qpsk;
    rate = s.substr(4);
  } else if (starts("16QAM") || starts("QAM16")) {
    p.modulation = Modulation::Qam16;
    rate = s.substr(5);
  } else if (starts("64QAM") || starts("QAM64")) {
    p.modulation = Modulation::Qam64;
    rate = s.substr(5);
  } else {
    throw std::invalid_argument("unknown modulation in MCS '" + std::string(text) + "'");
  }
  if (rate == "1/2" || rate == "12") {
    p.code_rate = CodeRate::Half;
  } else if (rate == "3/4" || rate == "34") {
    p.code_rate = CodeRate::ThreeQuarters;
  } else {
    throw std::invalid_argument("unknown code rate in MCS '" + std::string(text) + "'");
  }
  return p;
}

bool operator==(const McsProfile& a, const McsProfile& b) {
  return a.modulation == b.modulation && a.code_rate == b.code_rate;
}

std::vector<McsProfile> mcs_ladder() {
  return {{Modulation::Qpsk, CodeRate::Half},
          {Modulation::Qpsk, CodeRate::ThreeQuarters},
          {Modulation::Qam16, CodeRate::Half},
          {Modulation::Qam16, CodeRate::ThreeQuarters},
          {Modulation::Qam64, CodeRate::Half}};
}

void FadingChannelModel::validate() const {
  if (multipath_count < 1) throw std::invalid_argument("multipath_count must be >= 1");
  if (static_cast<int>(mean_tap_gains.size()) != multipath_count)
    throw std::invalid_argument("tap_gains must list multipath_count entries");
  for (double g : mean_tap_gains)
    if (!(g > 0.0)) throw std::invalid_argument("tap gains must be positive");
  bool all_equal = true, distinct = true;
  for (std::size_t i = 0; i < mean_tap_gains.size(); ++i)
    for (std::size_t j = i + 1; j < mean_tap_gains.size(); ++j) {
      double a = mean_tap_gains[i], b = mean_tap_gains[j];
      double rel = std::fabs(a - b) / std::max(a, b);
      if (rel > 1e-12) all_equal = false;
      if (rel < 1e-3) distinct = false;
    }
  if (!all_equal && !distinct)
    throw std::invalid_argument("tap gains must be all equal or pairwise distinct (>0.1% apart)");
  if (!(coherence_time > 0.0) || !(symbol_duration > 0.0))
    throw std::invalid_argument("coherence_time and symbol_duration must be positive");
}

long FadingChannelModel::symbols_per_block() const {
  // Guard against 1.4e-3 / 4e-6 landing just below an integer.
  long n = static_cast<long>(std::floor(coherence_time / symbol_duration * (1.0 + 1e-12)));
  return std::max(1L, n);
}

namespace {

bool equal_taps(const FadingChannelModel& ch) {
  for (double g : ch.mean_tap_gains)
    if (std::fabs(g - ch.mean_tap_gains[0]) > 1e-12 * ch.mean_tap_gains[0]) return false;
  return true;
}

// Per-tap means mu_n = mean * g_n / sum(g).
std::vector<double> tap_means(const FadingChannelModel& ch, double mean) {
  double total = 0.0;
  for (double g : ch.mean_tap_gains) total += g;
  std::vector<double> mu;
  for (double g : ch.mean_tap_gains) mu.push_back(mean * g / total);
  return mu;
}

double hypo_coefficient(const std::vector<double>& mu, std::size_t i) {
  double c = 1.0;
  for (std::size_t j = 0; j < mu.size(); ++j)
    if (j != i) c *= mu[i] / (mu[i] - mu[j]);
  return c;
}

}  // namespace

double combined_sinr_cdf(const FadingChannelModel& ch, double mean, double s) {
  if (s <= 0.0) return 0.0;
  const int m = static_cast<int>(ch.mean_tap_gains.size());
  if (m <= 1) return -std::expm1(-s / mean);
  if (equal_taps(ch)) {
    double mu = mean / m, z = s / mu, term = 1.0, sum = 1.0;
    for (int k = 1; k < m; ++k) {
      term *= z / k;
      sum += term;
    }
    return std::clamp(1.0 - std::exp(-z) * sum, 0.0, 1.0);
  }
  auto mu = tap_means(ch, mean);
  double c = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) c += hypo_coefficient(mu, i) * -std::expm1(-s / mu[i]);
  return std::clamp(c, 0.0, 1.0);
}

double combined_sinr_pdf(const FadingChannelModel& ch, double mean, double s) {
  if (s < 0.0) return 0.0;
  const int m = static_cast<int>(ch.mean_tap_gains.size());
  if (m <= 1) return std::exp(-s / mean) / mean;
  if (equal_taps(ch)) {
    double mu = mean / m;
    return std::exp((m - 1) * std::log(s / mu) - s / mu - std::lgamma(m)) / mu;
  }
  auto mu = tap_means(ch, mean);
  double p = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) p += hypo_coefficient(mu, i) * std::exp(-s / mu[i]) / mu[i];
  return std::max(0.0, p);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double gray_ber(Modulation m, double g) {
  switch (m) {
    case Modulation::Qpsk:
      return q_function(std::sqrt(g));
    case Modulation::Qam16: {
      double x = std::sqrt(g / 5.0);
      return (3.0 * q_function(x) + 2.0 * q_function(3.0 * x) - q_function(5.0 * x)) / 4.0;
    }
    case Modulation::Qam64: {
      double x = std::sqrt(g / 21.0);
      return (7.0 * q_function(x) + 6.0 * q_function(3.0 * x) - q_function(5.0 * x) +
              q_function(9.0 * x) - q_function(13.0 * x)) /
             12.0;
    }
  }
  return 0.5;
}

namespace {

const kernels::UnionTerms& terms_for(CodeRate rate) {
  static const kernels::UnionTerms half = union_terms(CodeRate::Half);
  static const kernels::UnionTerms tq = union_terms(CodeRate::ThreeQuarters);
  return rate == CodeRate::Half ? half : tq;
}

// Block error probability E[min(1, n * Pu(p(gamma)))] with gamma exponential.
// Split at gamma0 where n * Pu = 1: below it the bound is capped, above it the
// integrand decays steeply and composite Gauss-Legendre handles it.
class BlockErrorProfile {
 public:
  BlockErrorProfile(double bits, const McsProfile& mcs, const FadingChannelModel& ch) : ch_(ch) {
    if (bits <= 0.0) return;
    active_ = true;
    const auto& terms = terms_for(mcs.code_rate);
    auto bound = [&](double g) {
      double p = gray_ber(mcs.modulation, g);
      double pu;
      kernels::active().union_bound(&p, 1, terms, &pu);
      return bits * pu;
    };
    double lo = 1e-6, hi = 1.0;
    while (bound(hi) > 1.0) hi *= 2.0;
    for (int i = 0; i < 200 && hi / lo - 1.0 > 1e-14; ++i) {
      double mid = std::sqrt(lo * hi);
      (bound(mid) > 1.0 ? lo : hi) = mid;
    }
    g0_ = hi;
    double top = 2.0 * g0_;
    while (bound(top) > 1e-22) top *= 1.5;

    static constexpr std::array<double, 8> x = {-0.9602898564975363, -0.7966664774136267,
                                                -0.5255324099163290, -0.1834346424956498,
                                                0.1834346424956498,  0.5255324099163290,
                                                0.7966664774136267,  0.9602898564975363};
    static constexpr std::array<double, 8> w = {0.1012285362903763, 0.2223810344533745,
                                                0.3137066458778873, 0.3626837833783620,
                                                0.3626837833783620, 0.3137066458778873,
                                                0.2223810344533745, 0.1012285362903763};
    const int panels = 64;
    double h = (top - g0_) / panels;
    std::vector<double> bers;
    for (int k = 0; k < panels; ++k) {
      double mid = g0_ + (k + 0.5) * h;
      for (int j = 0; j < 8; ++j) {
        nodes_.push_back(mid + 0.5 * h * x[j]);
        weights_.push_back(0.5 * h * w[j]);
        bers.push_back(gray_ber(mcs.modulation, nodes_.back()));
      }
    }
    values_.resize(bers.size());
    kernels::active().union_bound(bers.data(), bers.size(), terms, values_.data());
    for (double& v : values_) v = std::min(1.0, bits * v);
  }

  double operator()(double mean) const {
    if (!active_) return 0.0;
    double s = combined_sinr_cdf(ch_, mean, g0_);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      s += weights_[i] * values_[i] * combined_sinr_pdf(ch_, mean, nodes_[i]);
    return std::min(1.0, s);
  }

 private:
  FadingChannelModel ch_;
  bool active_ = false;
  double g0_ = 0.0;
  std::vector<double> nodes_, weights_, values_;
};

// A packet is a run of full coherence blocks plus a partial one.
struct PacketLayout {
  double full_blocks = 0.0;
  double bits_full = 0.0;
  double bits_tail = 0.0;
};

PacketLayout layout(long length_bits, const FadingChannelModel& ch, const McsProfile& mcs) {
  double per_block = static_cast<double>(ch.symbols_per_block()) * mcs.info_bits_per_symbol();
  PacketLayout l;
  l.full_blocks = std::floor(length_bits / per_block);
  l.bits_full = per_block;
  l.bits_tail = length_bits - l.full_blocks * per_block;
  return l;
}

class PacketErrorModel {
 public:
  PacketErrorModel(long length_bits, const FadingChannelModel& ch, const McsProfile& mcs)
      : l_(layout(length_bits, ch, mcs)),
        full_(l_.full_blocks > 0 ? l_.bits_full : 0.0, mcs, ch),
        tail_(l_.bits_tail, mcs, ch) {}

  double operator()(double mean) const {
    double s = l_.full_blocks > 0 ? l_.full_blocks * full_(mean) : 0.0;
    return std::min(1.0, s + tail_(mean));
  }

 private:
  PacketLayout l_;
  BlockErrorProfile full_, tail_;
};

}  // namespace

double first_event_error(CodeRate rate, double p) {
  double out;
  kernels::active().union_bound(&p, 1, terms_for(rate), &out);
  return out;
}

double per_coded_packet(long length_bits, double mean_sinr, const FadingChannelModel& channel,
                        const McsProfile& mcs) {
  if (length_bits < 1) throw std::invalid_argument("packet length must be at least one bit");
  if (!(mean_sinr > 0.0)) throw std::invalid_argument("mean SINR must be positive");
  channel.validate();
  return PacketErrorModel(length_bits, channel, mcs)(mean_sinr);
}

double solve_threshold(long length_bits, double per_target, const FadingChannelModel& channel,
                       const McsProfile& mcs) {
  if (length_bits < 1) throw std::invalid_argument("packet length must be at least one bit");
  if (!(per_target > 0.0 && per_target < 1.0))
    throw std::invalid_argument("PER target must lie in (0, 1)");
  channel.validate();
  PacketErrorModel per(length_bits, channel, mcs);
  double lo = db_to_linear(-10.0), hi = db_to_linear(60.0);
  if (per(hi) > per_target)
    throw InfeasibleError("PER target " + std::to_string(per_target) + " unreachable below 60 dB for " +
                          std::to_string(length_bits) + "-bit " + mcs.name() + " packets");
  if (per(lo) <= per_target) return lo;
  while (hi / lo - 1.0 > 1e-7) {
    double mid = std::sqrt(lo * hi);
    (per(mid) > per_target ? lo : hi) = mid;
  }
  return hi;
}

double communication_range(double transmit_power, double threshold, double noise_power,
                           double wavelength, double pathloss_alpha) {
  if (!(transmit_power > 0.0) || !(threshold > 0.0) || !(noise_power > 0.0) || !(wavelength > 0.0))
    throw std::invalid_argument("range inputs must be positive");
  if (!(pathloss_alpha >= 2.0)) throw std::invalid_argument("path-loss exponent must be >= 2");
  double ratio = 2.0 * transmit_power / (threshold * noise_power);
  return std::sqrt(wavelength / (4.0 * std::numbers::pi) * std::pow(ratio, 1.0 / pathloss_alpha));
}

int mrc_transmission_count(double gamma_tD, double gamma_tC) {
  if (!(gamma_tD > 0.0) || !(gamma_tC > 0.0)) throw std::invalid_argument("thresholds must be positive");
  double r = gamma_tD / gamma_tC;
  if (r <= 1.0) return 1;
  return static_cast<int>(std::ceil(r));
}

double power_control_for_control_packet(double p_tD, double gamma_tC, double gamma_tD) {
  if (!(gamma_tC > 0.0) || !(gamma_tD > 0.0)) throw std::invalid_argument("thresholds must be positive");
  return p_tD * gamma_tC / gamma_tD;
}

LinkBudget link_budget(long control_bits, long data_bits, double per_target,
                       const FadingChannelModel& channel, const McsProfile& control_mcs,
                       const McsProfile& mcs, double p_tmax, double noise_power,
                       double wavelength, double alpha) {
  LinkBudget b;
  b.gamma_tC = solve_threshold(control_bits, per_target, channel, control_mcs);
  b.gamma_tD = solve_threshold(data_bits, per_target, channel, mcs);
  b.range_data = communication_range(p_tmax, b.gamma_tD, noise_power, wavelength, alpha);
  b.range_control = communication_range(p_tmax, b.gamma_tC, noise_power, wavelength, alpha);
  b.n_T = mrc_transmission_count(b.gamma_tD, b.gamma_tC);
  return b;
}

}  // namespace georoute
