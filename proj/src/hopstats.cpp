#include "georoute/hopstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "georoute/rng.hpp"

namespace georoute {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double empty_cycle_mean(double rho, double epsilon, double ppa_area) {
  if (!(rho > 0.0)) throw std::invalid_argument("density must be positive");
  double M = epsilon * rho * ppa_area;
  if (!(M > 0.0)) return kInf;
  // e^-M / (1 - e^-M) without cancellation for small M
  return 1.0 / std::expm1(M);
}

EmptySlotDistribution empty_slot_distribution(double rho, double epsilon,
                                              const std::vector<double>& ppa_subareas) {
  EmptySlotDistribution out;
  const int N = static_cast<int>(ppa_subareas.size());
  if (N == 0) throw std::invalid_argument("no subareas");
  double total = 0.0;
  for (double a : ppa_subareas) total += a;
  double M = epsilon * rho * total;
  if (!(M > 0.0)) throw std::invalid_argument("empty PPA: m_e is undefined");
  double norm = -std::expm1(-M);
  double partial = 0.0;
  out.pmf.resize(N);
  for (int k = 0; k < N; ++k) {
    double before = std::exp(-epsilon * rho * partial);
    partial += ppa_subareas[k];
    // e^{-a} - e^{-b} = e^{-a} (1 - e^{-(b-a)})
    out.pmf[k] = before * -std::expm1(-epsilon * rho * ppa_subareas[k]) / norm;
    out.mean += k * out.pmf[k];
  }
  return out;
}

std::vector<double> zero_truncated_poisson(double mean) {
  std::vector<double> pmf(1, 0.0);
  if (!(mean > 0.0)) {
    pmf.push_back(1.0);
    return pmf;
  }
  double norm = -std::expm1(-mean);
  // log p(n) = -mean + n log mean - log n!
  double cdf = 0.0;
  for (int n = 1;; ++n) {
    double p = std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0)) / norm;
    pmf.push_back(p);
    cdf += p;
    if (n > mean && (1.0 - cdf < 1e-16 || p < 1e-300)) break;
    if (n > 100000) break;
  }
  return pmf;
}

SplittingCost splitting_cost(int n) {
  static std::mutex mu;
  static std::vector<SplittingCost> cache{{0.0, 0.0}, {0.0, 0.0}};
  if (n < 2) return {};
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(cache.size()) <= n) {
    int m = static_cast<int>(cache.size());
    // Outcome k transmitters: k = 1 resolves, k in {0, m} repeats the same
    // set, 2 <= k < m recurses on the k transmitters.
    double stay = 2.0 * std::exp(-m * std::numbers::ln2);
    double slots = 1.0, tx = 0.5 * m;
    // Binomial(m, 1/2) weights, walked outward from the mode with the ratio
    // recurrence until they drop below 1e-18 of the peak.
    int mode = m / 2;
    double peak = std::exp(log_binomial(m, mode) - m * std::numbers::ln2);
    double pk = peak;
    for (int k = mode; k >= 2 && pk > 1e-18 * peak; --k) {
      if (k < m) {
        slots += pk * cache[k].slots;
        tx += pk * cache[k].transmissions;
      }
      pk *= static_cast<double>(k) / (m - k + 1);
    }
    pk = peak * (m - mode) / (mode + 1.0);
    for (int k = mode + 1; k < m && pk > 1e-18 * peak; ++k) {
      slots += pk * cache[k].slots;
      tx += pk * cache[k].transmissions;
      pk *= static_cast<double>(m - k) / (k + 1);
    }
    cache.push_back({slots / (1.0 - stay), tx / (1.0 - stay)});
  }
  return cache[n];
}

double geraf_collision_slots(double mean_contenders) {
  auto pmf = zero_truncated_poisson(mean_contenders);
  double s = 0.0;
  for (std::size_t n = 2; n < pmf.size(); ++n) s += pmf[n] * splitting_cost(static_cast<int>(n)).slots;
  return s;
}

double geraf_collision_transmissions(double mean_contenders) {
  auto pmf = zero_truncated_poisson(mean_contenders);
  double s = 0.0;
  for (std::size_t n = 2; n < pmf.size(); ++n)
    s += pmf[n] * splitting_cost(static_cast<int>(n)).transmissions;
  return s;
}

double boss_npa_probability(double rho, double epsilon, double R, double zeta) {
  double disk = epsilon * rho * std::numbers::pi * R * R;
  return std::exp(-zeta * disk) * -std::expm1(-(1.0 - zeta) * disk);
}

double boss_npa_probability_printed(double rho, double epsilon, double R, double zeta) {
  double disk = epsilon * rho * std::numbers::pi * R * R;
  return std::exp(-zeta * disk) * std::exp(-(1.0 - zeta) * disk);
}

double boss_collision_given(int n, int x) {
  if (x < 1) throw std::invalid_argument("x must be positive");
  if (n <= 1) return 0.0;
  // 1 - P(single earliest) = 1 - (n/x) sum_{m=0}^{x-1} (m/x)^{n-1}
  double s = 0.0;
  for (int m = 1; m < x; ++m) s += std::pow(static_cast<double>(m) / x, n - 1);
  return std::clamp(1.0 - static_cast<double>(n) / x * s, 0.0, 1.0);
}

double boss_collision_given_printed(int n, int x) {
  double s = 0.0;
  for (int j = 1; j <= x - 1; ++j) s += std::pow(static_cast<double>(x - j) / (x - j + 1), n - 1);
  return 1.0 - s;
}

double boss_collision_probability(int x, const std::vector<double>& contender_pmf) {
  double s = 0.0;
  for (std::size_t n = 2; n < contender_pmf.size(); ++n)
    s += contender_pmf[n] * boss_collision_given(static_cast<int>(n), x);
  return s;
}

double boss_collision_cycles(double p_c) {
  if (!(p_c >= 0.0 && p_c <= 1.0)) throw std::invalid_argument("p_c must be a probability");
  if (p_c >= 1.0) return kInf;
  return p_c / (1.0 - p_c);
}

namespace {

// Per earliest granule j, with t = (x-j)/x and u = (x-j-1)/x:
// P(earliest = j) = t^n - u^n, P(single at j) = (n/x) u^(n-1) and
// E[count at j; earliest = j] = (n/x) t^(n-1).
BossRoundMoments round_moments_uncached(int n, int x) {
  BossRoundMoments m;
  if (n < 1) return m;
  double pc = 0.0, e_j_col = 0.0, e_c_col = 0.0, e_cj_col = 0.0, e_j_succ = 0.0, psucc = 0.0;
  const double nx = static_cast<double>(n) / x;
  for (int j = 0; j < x; ++j) {
    double t = static_cast<double>(x - j) / x, u = static_cast<double>(x - j - 1) / x;
    double tn1 = std::pow(t, n - 1), un1 = std::pow(u, n - 1);
    if (tn1 == 0.0) break;
    double single = nx * un1;
    double col = std::max(0.0, t * tn1 - u * un1 - single);
    double col_count = std::max(0.0, nx * tn1 - single);
    psucc += single;
    e_j_succ += single * j;
    pc += col;
    e_j_col += col * j;
    e_c_col += col_count;
    e_cj_col += col_count * j;
    if (j > 0) m.offset += t * tn1;
  }
  m.p_collision = std::clamp(pc, 0.0, 1.0);
  if (pc > 0.0) {
    m.offset_given_collision = e_j_col / pc;
    m.colliders_given_collision = e_c_col / pc;
    m.colliders_offset_given_collision = e_cj_col / pc;
  }
  if (psucc > 0.0) m.offset_given_success = e_j_succ / psucc;
  return m;
}

}  // namespace

BossRoundMoments boss_round_moments(int n, int x) {
  if (x < 1) throw std::invalid_argument("x must be positive");
  static std::mutex mu;
  static std::map<std::pair<int, int>, BossRoundMoments> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, x);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  return cache.emplace(key, round_moments_uncached(n, x)).first->second;
}

ContentionProfile contention_profile(const SlicingGeometry& g, double rho, double epsilon) {
  ContentionProfile p;
  const int N = g.subarea_count;
  std::vector<double> ppa(g.subareas.begin(), g.subareas.begin() + N);
  auto dist = empty_slot_distribution(rho, epsilon, ppa);
  p.ppa_mean = epsilon * rho * g.ppa_area;
  p.npa_mean = epsilon * rho * g.npa_area;
  double upto = 0.0;
  for (int k = 0; k < N; ++k) {
    upto += ppa[k];
    ContentionSlice s;
    s.probability = dist.pmf[k];
    s.contenders_mean = epsilon * rho * ppa[k];
    s.beyond_mean = std::max(0.0, epsilon * rho * (g.ppa_area - upto));
    p.slices.push_back(s);
  }
  return p;
}

HopStatistics hop_statistics(const SlicingGeometry& g, double rho, double epsilon, int x,
                             double mn_override) {
  HopStatistics h;
  const int N = g.subarea_count;
  h.mean_eta = empty_cycle_mean(rho, epsilon, g.ppa_area);
  ContentionProfile prof = contention_profile(g, rho, epsilon);

  double pc = 0.0, mixture = 0.0, me_fine = 0.0, mn = 0.0, tx = 0.0;
  for (int k = 0; k < N; ++k) {
    const ContentionSlice& s = prof.slices[k];
    h.me_pmf.push_back(s.probability);
    h.mean_me += k * s.probability;
    if (s.probability == 0.0) continue;
    auto pmf = zero_truncated_poisson(s.contenders_mean);
    for (std::size_t n = 1; n < pmf.size(); ++n) {
      double w = s.probability * pmf[n];
      if (w < 1e-300) continue;
      int ni = static_cast<int>(n);
      BossRoundMoments r = boss_round_moments(ni, x);
      pc += w * r.p_collision;
      if (r.p_collision < 1.0) mixture += w * r.p_collision / (1.0 - r.p_collision);
      me_fine += w * (k * x + r.offset_given_success);
      SplittingCost sc = splitting_cost(ni);
      mn += w * sc.slots;
      tx += w * sc.transmissions;
    }
  }
  h.mean_mn = mn_override >= 0.0 ? mn_override : mn;
  h.mean_cts_transmissions = tx;
  h.p_c = std::clamp(pc, 0.0, 1.0);
  h.mean_eta_prime = boss_collision_cycles(h.p_c);
  h.mean_eta_prime_mixture = mixture;
  h.mean_me_fine = me_fine;

  h.p_npa = boss_npa_probability(rho, epsilon, g.range, g.zeta);
  h.p_ppa = 1.0 - h.p_npa;
  h.p_npa_printed = boss_npa_probability_printed(rho, epsilon, g.range, g.zeta);

  // printed p_{c|n} averaged over the same contender law, for side-by-side reports
  double printed = 0.0;
  for (int k = 0; k < N; ++k) {
    auto pmf = zero_truncated_poisson(prof.slices[k].contenders_mean);
    for (std::size_t n = 2; n < pmf.size(); ++n)
      printed += prof.slices[k].probability * pmf[n] * boss_collision_given_printed(static_cast<int>(n), x);
  }
  h.p_c_printed = printed;
  return h;
}

namespace {

// Length of the set of points at progress t inside the sender's disk.
double progress_chord(double R, double d, double t) {
  if (std::isinf(d)) return 2.0 * std::sqrt(std::max(0.0, R * R - t * t));
  double r = d - t;
  if (r <= 0.0) return 0.0;
  double c = std::clamp((r * r + d * d - R * R) / (2.0 * r * d), -1.0, 1.0);
  return 2.0 * r * std::acos(c);
}

// Progress t in [lo, hi] at which the lens area beyond t equals target.
// area_beyond is decreasing with derivative -chord, so safeguarded Newton
// converges in a handful of steps.
double progress_at_area(double R, double d, double target, double lo, double hi) {
  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 100 && hi - lo > 1e-12 * R; ++i) {
    double f = area_beyond(R, d, t) - target;
    if (f > 0.0) lo = t; else hi = t;
    if (std::fabs(f) <= 1e-13 * R * R) break;
    double slope = progress_chord(R, d, t);
    double next = slope > 0.0 ? t + f / slope : 0.5 * (lo + hi);
    t = next > lo && next < hi ? next : 0.5 * (lo + hi);
  }
  return t;
}

}  // namespace

HopCountEstimate expected_hop_count(double D, double R, double rho, double epsilon, int N,
                                    SlicingStrategy strategy, AdvanceRule rule, long routes,
                                    std::uint64_t seed) {
  if (!(D > 0.0)) throw std::invalid_argument("route length must be positive");
  if (N < 1) throw std::invalid_argument("subarea count must be at least 1");
  HopCountEstimate est;
  est.routes = routes;
  if (D <= R || routes <= 0) {
    est.mean = 1.0;
    return est;
  }
  const double density = epsilon * rho;
  std::vector<double> bounds(N + 1), beyond(N + 1);
  double sum = 0.0, sum2 = 0.0;
  for (long r = 0; r < routes; ++r) {
    Philox rng(seed, Stream::HopCount, static_cast<std::uint64_t>(r));
    double d = D;
    long hops = 0;
    while (d > R && hops < 1000000) {
      const double ppa = ppa_area(R, d);
      const double M = density * ppa;
      if (!(M > 0.0)) throw std::domain_error("no relays reachable");
      // Conditioned on a non-empty PPA. Both rules only need the lens area
      // beyond a progress value, which is closed form.
      double adv;
      double u = rng.uniform();
      if (rule == AdvanceRule::MaxProgress) {
        // P(max <= t | n >= 1) = (e^{-density A(t)} - e^{-M}) / (1 - e^{-M})
        double target = -std::log(std::exp(-M) + u * -std::expm1(-M)) / density;
        adv = progress_at_area(R, d, std::min(target, ppa), 0.0, R);
      } else {
        bounds[0] = R;
        bounds[N] = 0.0;
        for (int i = 1; i < N; ++i) {
          bounds[i] = strategy == SlicingStrategy::EqualProgress
                          ? R * (N - i) / N
                          : progress_at_area(R, d, ppa * i / N, 0.0, R);
        }
        for (int i = 0; i <= N; ++i) beyond[i] = i == N ? ppa : area_beyond(R, d, bounds[i]);
        // First non-empty subarea k with P(k) = e^{-density A_k}(1 - e^{-density a_k}) / (1 - e^{-M}).
        double acc = 0.0, norm = -std::expm1(-M);
        int k = N - 1;
        for (int i = 0; i < N; ++i) {
          double a = beyond[i + 1] - beyond[i];
          acc += std::exp(-density * beyond[i]) * -std::expm1(-density * a) / norm;
          if (u < acc) {
            k = i;
            break;
          }
        }
        // The relay is uniform over subarea k.
        double v = rng.uniform();
        double target = beyond[k] + v * (beyond[k + 1] - beyond[k]);
        adv = progress_at_area(R, d, target, bounds[k + 1], bounds[k]);
      }
      d -= adv;
      ++hops;
    }
    ++hops;  // the destination answers the last hop
    sum += hops;
    sum2 += static_cast<double>(hops) * hops;
  }
  est.mean = sum / routes;
  double var = routes > 1 ? (sum2 - sum * sum / routes) / (routes - 1) : 0.0;
  est.stderr_mean = std::sqrt(std::max(0.0, var) / routes);
  return est;
}

double hop_count_approx(double D, double R, double rho, double epsilon, int N,
                        SlicingStrategy strategy, AdvanceRule rule) {
  if (D <= R) return 1.0;
  const SlicingGeometry g = slice_far_field(R, N, strategy);
  double M = epsilon * rho * g.ppa_area;
  const int steps = 4000;
  double h = R / steps, adv = 0.0;
  if (rule == AdvanceRule::MaxProgress) {
    for (int i = 0; i < steps; ++i) {
      double t = (i + 0.5) * h;
      adv += -std::expm1(-epsilon * rho * area_beyond(R, kInf, t)) * h;
    }
    adv /= -std::expm1(-M);
  } else {
    auto dist = empty_slot_distribution(rho, epsilon, {g.subareas.begin(), g.subareas.begin() + N});
    for (int k = 0; k < N; ++k) {
      double lo = g.ppa_bounds[k + 1], hi = g.ppa_bounds[k];
      double num = 0.0, den = 0.0, hh = (hi - lo) / 400;
      for (int i = 0; i < 400; ++i) {
        double t = lo + (i + 0.5) * hh;
        double w = 2.0 * std::sqrt(std::max(0.0, R * R - t * t));
        num += t * w * hh;
        den += w * hh;
      }
      adv += dist.pmf[k] * num / den;
    }
  }
  return std::ceil(D / adv);
}

}  // namespace georoute
