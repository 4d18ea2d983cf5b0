#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "georoute/config.hpp"

namespace georoute {

struct CheckLine {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = true;
  double seconds = 0.0;
  std::vector<CheckLine> lines;

  void check(std::string name, bool ok, std::string detail = {});
};

struct ValidationOptions {
  std::uint64_t seed = 1;
  long bit_packets = 100000;   // criterion 2
  long oracle_trials = 10000;  // criterion 3, per protocol and grid point
  long spot_draws = 1000000;   // criterion 9
  std::string cli_path;        // criterion 10; empty skips it
  unsigned threads = 0;
};

// Bit-level Monte Carlo of the coded link: random payload, zero-tailed
// convolutional encoding, block fading over coherence blocks, hard-decision
// BSC per coded bit, Viterbi decoding.
struct BitLevelEstimate {
  long packets = 0;
  long errors = 0;
  double per = 0.0;
  double stderr_per = 0.0;
};
BitLevelEstimate bit_level_per(long length_bits, double mean_sinr, const FadingChannelModel& channel,
                               const McsProfile& mcs, long packets, std::uint64_t seed);

// One (rho, epsilon, N, x) point of the oracle grid, optionally with a short
// route so the geometry is not the far field.
struct OraclePoint {
  double rho;
  double epsilon;
  int N;
  int x;
  double D = 100.0;
};
std::vector<OraclePoint> oracle_grid();
ScenarioConfig oracle_config(const OraclePoint& p);

CriterionResult criterion_link_anchor();                                    // 1
CriterionResult criterion_union_bound(const ValidationOptions& o);          // 2
CriterionResult criterion_oracle_agreement(const ValidationOptions& o);     // 3
CriterionResult criterion_density_trends(const ValidationOptions& o);       // 4
CriterionResult criterion_vanet(const ValidationOptions& o);                // 5
CriterionResult criterion_rescue(const ValidationOptions& o);               // 6
CriterionResult criterion_optimizer(const ValidationOptions& o);            // 7
CriterionResult criterion_packet_length(const ValidationOptions& o);        // 8
CriterionResult criterion_spot_checks(const ValidationOptions& o);          // 9
CriterionResult criterion_determinism(const ValidationOptions& o);          // 10

CriterionResult run_criterion(int id, const ValidationOptions& o);

// Which protocols beat the opt baseline in energy or delay on each preset.
// Informational: the baseline is a reference handshake, not a bound.
std::vector<CheckLine> dominance_report();

std::string format_criterion(const CriterionResult& r, bool verbose);

}  // namespace georoute
