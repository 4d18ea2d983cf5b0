#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <algorithm>
#include <utility>

#include "georoute/hopstats.hpp"
#include "georoute/rng.hpp"

using namespace georoute;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("empty cycles") {
  // M = eps * rho * A
  CHECK(empty_cycle_mean(1.0, 1.0, std::log(2.0)) == doctest::Approx(1.0));
  CHECK(empty_cycle_mean(1.0, 1.0, 50.0) < 1e-20);
  CHECK(empty_cycle_mean(0.5, 0.4, 1.0) > empty_cycle_mean(0.6, 0.4, 1.0));
  CHECK(empty_cycle_mean(0.5, 0.4, 1.0) > empty_cycle_mean(0.5, 0.5, 1.0));

  // M = 0.5: count Poisson-empty draws before the first non-empty one
  Philox rng(1, Stream::Oracle);
  const long n = 1000000;
  long empties = 0, draws = 0;
  while (draws < n) {
    if (rng.poisson(0.5) == 0) ++empties;
    else ++draws;
  }
  CHECK(static_cast<double>(empties) / n == doctest::Approx(empty_cycle_mean(1.0, 1.0, 0.5)).epsilon(0.01));
}

TEST_CASE("empty-slot pmf") {
  auto one = empty_slot_distribution(1.0, 1.0, {3.0});
  CHECK(one.pmf.size() == 1);
  CHECK(one.pmf[0] == doctest::Approx(1.0));
  CHECK(one.mean == 0.0);

  // M = 2 on four equal slices
  std::vector<double> a(4, 0.5);
  auto e = empty_slot_distribution(1.0, 1.0, a);
  CHECK(std::accumulate(e.pmf.begin(), e.pmf.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  Philox rng(2, Stream::Oracle);
  std::vector<long> hist(4, 0);
  long kept = 0;
  while (kept < 1000000) {
    int first = -1;
    for (int i = 0; i < 4; ++i)
      if (rng.poisson(0.5) > 0 && first < 0) first = i;
    if (first < 0) continue;
    ++hist[first];
    ++kept;
  }
  for (int i = 0; i < 4; ++i) {
    double p = static_cast<double>(hist[i]) / kept;
    double se = std::sqrt(e.pmf[i] * (1 - e.pmf[i]) / kept);
    CHECK(std::fabs(p - e.pmf[i]) <= 3.0 * se);
  }
}

TEST_CASE("zero-truncated Poisson normalizes") {
  for (double m : {0.01, 1.0, 30.0}) {
    auto p = zero_truncated_poisson(m);
    CHECK(p[0] == 0.0);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("splitting resolution") {
  CHECK(splitting_cost(1).slots == 0.0);
  CHECK(splitting_cost(2).slots == doctest::Approx(2.0));

  Philox rng(3, Stream::Oracle);
  const long n = 1000000;
  double total = 0.0;
  for (long t = 0; t < n; ++t) {
    long slots = 0;
    for (;;) {
      ++slots;
      bool a = rng.bernoulli(0.5), b = rng.bernoulli(0.5);
      if (a != b) break;
    }
    total += slots;
  }
  CHECK(total / n == doctest::Approx(2.0).epsilon(0.005));

  double m1 = geraf_collision_slots(2.0);
  CHECK(m1 > 0.0);
  CHECK(geraf_collision_slots(4.0) > m1);
}

TEST_CASE("NPA probability") {
  // zeta = 1/2 and eps rho pi R^2 = 2
  double R = std::sqrt(2.0 / kPi);
  CHECK(boss_npa_probability(1.0, 1.0, R, 0.5) == doctest::Approx(std::exp(-1.0) * (1 - std::exp(-1.0))));
  CHECK(boss_npa_probability(1.0, 1.0, R, 0.5) == doctest::Approx(0.23254).epsilon(1e-4));
  CHECK(boss_npa_probability(1.0, 1e-12, R, 0.5) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(boss_npa_probability(1.0, 1.0, R, 1.0) == doctest::Approx(0.0));
  CHECK(boss_npa_probability_printed(1.0, 1.0, R, 0.5) == doctest::Approx(std::exp(-2.0)));

  Philox rng(4, Stream::Oracle);
  const long n = 1000000;
  long hit = 0;
  for (long t = 0; t < n; ++t)
    if (rng.poisson(1.0) == 0 && rng.poisson(1.0) > 0) ++hit;
  double p = boss_npa_probability(1.0, 1.0, R, 0.5);
  CHECK(std::fabs(static_cast<double>(hit) / n - p) <= 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("BOSS collision probability") {
  CHECK(boss_collision_given(0, 4) == 0.0);
  CHECK(boss_collision_given(1, 4) == 0.0);
  CHECK(boss_collision_given(2, 4) == doctest::Approx(0.25));
  CHECK(boss_collision_given(2, 32) == doctest::Approx(1.0 / 32));
  // the typeset expression is not a probability; kept for side-by-side reporting
  CHECK(boss_collision_given_printed(2, 4) == doctest::Approx(1.0 - (3.0 / 4 + 2.0 / 3 + 1.0 / 2)));

  // exhaustive enumeration for n = 3, x = 3
  int collide = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        int m = std::min({a, b, c});
        collide += (a == m) + (b == m) + (c == m) >= 2;
      }
  double exact = collide / 27.0;
  CHECK(boss_collision_given(3, 3) == doctest::Approx(exact).epsilon(1e-12));
  Philox rng(5, Stream::Oracle);
  const long n = 10000000;
  long hits = 0;
  for (long t = 0; t < n; ++t) {
    auto a = rng.below(3), b = rng.below(3), c = rng.below(3);
    auto m = std::min({a, b, c});
    hits += (a == m) + (b == m) + (c == m) >= 2;
  }
  CHECK(std::fabs(static_cast<double>(hits) / n - exact) <= 3.0 * std::sqrt(exact * (1 - exact) / n));

  auto pmf = zero_truncated_poisson(2.0);
  auto pmf3 = zero_truncated_poisson(3.0);
  CHECK(boss_collision_probability(8, pmf3) > boss_collision_probability(8, pmf));
  CHECK(boss_collision_probability(16, pmf) < boss_collision_probability(8, pmf));

  CHECK(boss_collision_cycles(0.0) == 0.0);
  CHECK(boss_collision_cycles(0.5) == doctest::Approx(1.0));
  double p = 0.3, direct = 0.0;
  for (int k = 1; k < 200; ++k) direct += k * std::pow(p, k) * (1 - p);
  CHECK(boss_collision_cycles(p) == doctest::Approx(direct).epsilon(1e-10));
  CHECK(std::isinf(boss_collision_cycles(1.0)));
}

TEST_CASE("round moments are consistent") {
  auto m = boss_round_moments(3, 8);
  CHECK(m.p_collision == doctest::Approx(boss_collision_given(3, 8)));
  CHECK(m.offset == doctest::Approx(m.p_collision * m.offset_given_collision +
                                    (1 - m.p_collision) * m.offset_given_success));
  CHECK(m.colliders_given_collision >= 2.0);

  // brute force over all x^n offset assignments
  for (auto [n, x] : {std::pair{1, 4}, std::pair{2, 4}, std::pair{3, 5}, std::pair{4, 3}}) {
    double pc = 0, jc = 0, cc = 0, cjc = 0, js = 0, j_all = 0;
    long total = 1;
    for (int i = 0; i < n; ++i) total *= x;
    for (long code = 0; code < total; ++code) {
      std::vector<int> off(n);
      long c = code;
      for (int i = 0; i < n; ++i, c /= x) off[i] = static_cast<int>(c % x);
      int j = *std::min_element(off.begin(), off.end());
      int at = static_cast<int>(std::count(off.begin(), off.end(), j));
      j_all += j;
      if (at >= 2) {
        pc += 1;
        jc += j;
        cc += at;
        cjc += at * j;
      } else {
        js += j;
      }
    }
    auto r = boss_round_moments(n, x);
    CHECK(r.p_collision == doctest::Approx(pc / total).epsilon(1e-12));
    CHECK(r.offset == doctest::Approx(j_all / total).epsilon(1e-12));
    if (pc > 0) {
      CHECK(r.offset_given_collision == doctest::Approx(jc / pc).epsilon(1e-12));
      CHECK(r.colliders_given_collision == doctest::Approx(cc / pc).epsilon(1e-12));
      CHECK(r.colliders_offset_given_collision == doctest::Approx(cjc / pc).epsilon(1e-12));
    }
    CHECK(r.offset_given_success == doctest::Approx(js / (total - pc)).epsilon(1e-12));
  }
  // the dense regime stays cheap
  auto big = boss_round_moments(150000, 32);
  CHECK(big.p_collision == doctest::Approx(1.0));
  CHECK(splitting_cost(50000).slots > splitting_cost(1000).slots);
}

TEST_CASE("hop statistics") {
  auto g = slice_far_field(100.0, 4);
  auto s = hop_statistics(g, 1e-3, 0.1, 32);
  CHECK(s.p_npa + s.p_ppa == 1.0);
  double M = 0.1 * 1e-3 * g.ppa_area;
  CHECK(s.mean_eta == doctest::Approx(std::exp(-M) / (1 - std::exp(-M))));
  for (double v : {s.p_npa, s.p_c, s.p_npa_printed}) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  auto dense = hop_statistics(g, 10.0, 1.0, 32);
  CHECK(dense.mean_eta < 1e-100);
  CHECK(hop_statistics(g, 1e-3, 0.1, 32, 2.5).mean_mn == 2.5);
}

TEST_CASE("hop count") {
  auto single = expected_hop_count(80.0, 100.0, 1e-3, 0.5, 4, SlicingStrategy::EqualProgress,
                                   AdvanceRule::MaxProgress, 1000, 1);
  CHECK(single.mean == 1.0);
  auto dense = expected_hop_count(1050.0, 100.0, 10.0, 1.0, 4, SlicingStrategy::EqualProgress,
                                  AdvanceRule::MaxProgress, 2000, 1);
  CHECK(dense.mean == doctest::Approx(11.0).epsilon(0.01));

  // D = 10R with M = 5 on the PPA
  double rho = 5.0 / (std::numbers::pi * 1e4 / 2.0);
  auto a = expected_hop_count(1000.0, 100.0, rho, 1.0, 4, SlicingStrategy::EqualProgress,
                              AdvanceRule::FirstSliceUniform, 20000, 1);
  auto b = expected_hop_count(1000.0, 100.0, rho, 1.0, 4, SlicingStrategy::EqualProgress,
                              AdvanceRule::FirstSliceUniform, 20000, 2);
  CHECK(a.mean >= 10.0);
  CHECK(std::fabs(a.mean - b.mean) <= 2.0 * std::hypot(a.stderr_mean, b.stderr_mean));
  auto c = expected_hop_count(1000.0, 120.0, rho, 1.0, 4, SlicingStrategy::EqualProgress,
                              AdvanceRule::FirstSliceUniform, 20000, 1);
  CHECK(c.mean < a.mean);
  CHECK(hop_count_approx(1000.0, 100.0, rho, 1.0, 4, SlicingStrategy::EqualProgress,
                         AdvanceRule::FirstSliceUniform) >= 10.0);
}
