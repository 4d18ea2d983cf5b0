#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "georoute/convcode.hpp"

namespace georoute {

// Raised when no operating point satisfies the requested constraint, e.g. a
// PER target that cannot be met inside the SINR search bracket.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Modulation { Qpsk, Qam16, Qam64 };

struct McsProfile {
  Modulation modulation = Modulation::Qpsk;
  CodeRate code_rate = CodeRate::Half;

  int coded_bits_per_symbol() const;
  double info_bits_per_symbol() const;
  std::string name() const;
  // Accepts names such as "QPSK-1/2", "16QAM-3/4", "qam64-3/4".
  static McsProfile parse(std::string_view text);
};

bool operator==(const McsProfile& a, const McsProfile& b);

// The five rescue-scenario entries, lowest rate first.
std::vector<McsProfile> mcs_ladder();

struct FadingChannelModel {
  int multipath_count = 1;
  std::vector<double> mean_tap_gains{1.0};
  double coherence_time = 1.4e-3;
  double symbol_duration = 4e-6;

  // Taps must be all equal or pairwise distinct, so the combined SINR has a
  // closed-form Erlang or hypoexponential law.
  void validate() const;
  long symbols_per_block() const;
};

// Law of the RAKE-combined block SINR sum_n gamma_n, each tap exponential
// with its share of the total mean.
double combined_sinr_cdf(const FadingChannelModel& channel, double mean_sinr, double s);
double combined_sinr_pdf(const FadingChannelModel& channel, double mean_sinr, double s);

double q_function(double x);

// Gray-mapped hard-decision bit error rate at symbol SNR es_n0.
double gray_ber(Modulation m, double es_n0);

// First-event error probability per trellis step on a BSC with crossover p.
double first_event_error(CodeRate rate, double p);

double per_coded_packet(long length_bits, double mean_sinr, const FadingChannelModel& channel,
                        const McsProfile& mcs);

// Smallest mean SINR (linear) meeting per_target; throws InfeasibleError when
// the target is out of reach within [-10 dB, +60 dB].
double solve_threshold(long length_bits, double per_target, const FadingChannelModel& channel,
                       const McsProfile& mcs);

double communication_range(double transmit_power, double threshold, double noise_power,
                           double wavelength, double pathloss_alpha);

int mrc_transmission_count(double gamma_tD, double gamma_tC);

double power_control_for_control_packet(double p_tD, double gamma_tC, double gamma_tD);

struct LinkBudget {
  double gamma_tC = 0.0;
  double gamma_tD = 0.0;
  double range_data = 0.0;     // data packet at P_tmax
  double range_control = 0.0;  // control packet at P_tmax
  int n_T = 1;
};

// Control frames use control_mcs, data frames mcs.
LinkBudget link_budget(long control_bits, long data_bits, double per_target,
                       const FadingChannelModel& channel, const McsProfile& control_mcs,
                       const McsProfile& mcs, double p_tmax, double noise_power,
                       double wavelength, double alpha);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

}  // namespace georoute
