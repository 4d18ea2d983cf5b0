#pragma once

#include <cstdint>
#include <vector>

#include "georoute/geometry.hpp"

namespace georoute {

// Cycles with no awake node in the PPA before the first useful one.
double empty_cycle_mean(double rho, double epsilon, double ppa_area);

struct EmptySlotDistribution {
  std::vector<double> pmf;  // P(m_e = k), k = 0..N-1, given a non-empty PPA
  double mean = 0.0;
};

EmptySlotDistribution empty_slot_distribution(double rho, double epsilon,
                                              const std::vector<double>& ppa_subareas);

// Zero-truncated Poisson pmf, index n = count (entry 0 is always 0). The
// tail beyond the returned support carries less than 1e-16 of the mass.
std::vector<double> zero_truncated_poisson(double mean);

// Probability-1/2 splitting after a collision among n >= 2 responders:
// expected slots until exactly one transmits, and expected CTS transmissions
// spent on the way (the final clean one included).
struct SplittingCost {
  double slots = 0.0;
  double transmissions = 0.0;
};
SplittingCost splitting_cost(int n);

// E[m_n] with the contender count zero-truncated Poisson of the given mean.
double geraf_collision_slots(double mean_contenders);
double geraf_collision_transmissions(double mean_contenders);

double boss_npa_probability(double rho, double epsilon, double R, double zeta);
// The expression as typeset, without the complement factor.
double boss_npa_probability_printed(double rho, double epsilon, double R, double zeta);

// n responders pick uniform offsets among x granules; collision when the
// earliest used granule holds two or more.
double boss_collision_given(int n, int x);
double boss_collision_given_printed(int n, int x);
double boss_collision_probability(int x, const std::vector<double>& contender_pmf);
double boss_collision_cycles(double p_c);

// Moments of one BOSS response round with n responders over x granules.
struct BossRoundMoments {
  double p_collision = 0.0;
  double offset_given_collision = 0.0;        // E[j | collision]
  double colliders_given_collision = 0.0;     // E[c | collision]
  double colliders_offset_given_collision = 0.0;  // E[c j | collision]
  double offset_given_success = 0.0;          // E[j | single earliest]
  double offset = 0.0;                        // E[j]
};
BossRoundMoments boss_round_moments(int n, int x);

// Per first-non-empty-slice contention data, shared by the closed-form
// statistics and the exact ledgers.
struct ContentionSlice {
  double probability = 0.0;      // P(m_e = k)
  double contenders_mean = 0.0;  // Poisson mean of awake nodes in slice k+1
  double beyond_mean = 0.0;      // awake PPA nodes in slices after k+1
};

struct ContentionProfile {
  std::vector<ContentionSlice> slices;
  double ppa_mean = 0.0;  // M
  double npa_mean = 0.0;  // awake NPA nodes
};

ContentionProfile contention_profile(const SlicingGeometry& g, double rho, double epsilon);

struct HopStatistics {
  double mean_eta = 0.0;
  double mean_me = 0.0;
  double mean_mn = 0.0;
  double p_npa = 0.0;
  double p_ppa = 1.0;
  double p_c = 0.0;
  double mean_eta_prime = 0.0;
  double expected_hops = 1.0;

  std::vector<double> me_pmf;
  double hops_stderr = 0.0;
  double mean_cts_transmissions = 0.0;  // GeRaF splitting
  double mean_me_fine = 0.0;            // BOSS successful round, in granules
  double p_c_printed = 0.0;
  double p_npa_printed = 0.0;
  // E[eta'] averaged over the contender count rather than plugged in at p_c
  double mean_eta_prime_mixture = 0.0;
};

// Everything but the hop count. mn_override >= 0 replaces E[m_n].
HopStatistics hop_statistics(const SlicingGeometry& g, double rho, double epsilon, int x,
                             double mn_override = -1.0);

// How the relay is picked inside the winning slice.
enum class AdvanceRule {
  MaxProgress,        // best node of the whole PPA
  FirstSliceUniform,  // any node of the first non-empty slice, uniformly
};

struct HopCountEstimate {
  double mean = 1.0;
  double stderr_mean = 0.0;
  long routes = 0;
};

HopCountEstimate expected_hop_count(double D, double R, double rho, double epsilon, int N,
                                    SlicingStrategy strategy, AdvanceRule rule, long routes,
                                    std::uint64_t seed);

// ceil(D / E[advance]) with the far-field advance distribution.
double hop_count_approx(double D, double R, double rho, double epsilon, int N,
                        SlicingStrategy strategy, AdvanceRule rule);

}  // namespace georoute
