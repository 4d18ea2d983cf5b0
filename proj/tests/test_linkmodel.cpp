#include <doctest.h>

#include <cmath>
#include <numbers>

#include "georoute/linkmodel.hpp"
#include "georoute/rng.hpp"
#include "georoute/validation.hpp"

using namespace georoute;

namespace {
FadingChannelModel flat() { return FadingChannelModel{}; }
McsProfile qpsk_half() { return McsProfile{}; }
}  // namespace

TEST_CASE("MCS names parse and print") {
  CHECK(McsProfile::parse("QPSK-1/2") == McsProfile{Modulation::Qpsk, CodeRate::Half});
  CHECK(McsProfile::parse("qam64-3/4") == McsProfile{Modulation::Qam64, CodeRate::ThreeQuarters});
  CHECK(McsProfile::parse("16QAM-3/4").name() == "16QAM-3/4");
  CHECK_THROWS_AS(McsProfile::parse("8PSK-1/2"), std::invalid_argument);
  CHECK(mcs_ladder().size() == 5);
  CHECK(McsProfile{}.info_bits_per_symbol() == doctest::Approx(1.0));
}

TEST_CASE("20-fold packet growth costs about 8 dB at PER 20%") {
  McsProfile cm = qpsk_half();
  double g1 = solve_threshold(88, 0.2, flat(), cm);
  double g2 = solve_threshold(1760, 0.2, flat(), cm);
  CHECK(linear_to_db(g2) - linear_to_db(g1) == doctest::Approx(8.0).epsilon(0.125));
}

TEST_CASE("threshold round trip through the forward model") {
  for (long L : {88L, 512L, 2000L})
    for (double p : {0.01, 0.1, 0.5}) {
      double g = solve_threshold(L, p, flat(), qpsk_half());
      double per = per_coded_packet(L, g, flat(), qpsk_half());
      CHECK(per <= p * (1.0 + 1e-12));
      CHECK(per >= p * (1.0 - 1e-3));
    }
}

TEST_CASE("PER is monotone in length and in SINR") {
  double prev = 0.0;
  for (long L : {50L, 100L, 400L, 1600L}) {
    double per = per_coded_packet(L, db_to_linear(15.0), flat(), qpsk_half());
    CHECK(per >= prev);
    prev = per;
  }
  prev = 1.0;
  for (double db = 0.0; db <= 40.0; db += 5.0) {
    double per = per_coded_packet(512, db_to_linear(db), flat(), qpsk_half());
    CHECK(per <= prev);
    prev = per;
  }
  CHECK(per_coded_packet(512, db_to_linear(80.0), flat(), qpsk_half()) < 1e-6);
}

TEST_CASE("threshold monotone in length and target") {
  double a = solve_threshold(100, 0.1, flat(), qpsk_half());
  double b = solve_threshold(1000, 0.1, flat(), qpsk_half());
  double c = solve_threshold(1000, 0.3, flat(), qpsk_half());
  CHECK(a <= b);
  CHECK(c <= b);
  CHECK_THROWS_AS(solve_threshold(1000, 1e-12, flat(), qpsk_half()), InfeasibleError);
}

TEST_CASE("range formula") {
  double r = communication_range(1e-3, 10.0, 1e-10, 0.125, 3.0);
  double direct = std::sqrt(0.125 / (4.0 * std::numbers::pi) * std::cbrt(2.0 * 1e-3 / (10.0 * 1e-10)));
  CHECK(r == doctest::Approx(direct).epsilon(1e-14));
  CHECK(communication_range(16e-3, 10.0, 1e-10, 0.125, 2.0) ==
        doctest::Approx(2.0 * communication_range(1e-3, 10.0, 1e-10, 0.125, 2.0)));
  double k = 1.7;
  CHECK(communication_range(1e-3 * std::pow(k, 6.0), 10.0, 1e-10, 0.125, 3.0) == doctest::Approx(k * r));
  // P_t / gamma_t invariance
  CHECK(communication_range(3e-3, 30.0, 1e-10, 0.125, 3.0) == doctest::Approx(r).epsilon(1e-12));
  CHECK(communication_range(2e-3, 10.0, 1e-10, 0.125, 3.0) > r);
  CHECK_THROWS_AS(communication_range(0.0, 10.0, 1e-10, 0.125, 3.0), std::invalid_argument);
}

TEST_CASE("MRC count and power control") {
  CHECK(mrc_transmission_count(5.0, 5.0) == 1);
  CHECK(mrc_transmission_count(3.2, 1.0) == 4);
  CHECK(mrc_transmission_count(1.0, 2.0) == 1);
  CHECK(power_control_for_control_packet(1e-3, 4.0, 4.0) == doctest::Approx(1e-3));
  double p = power_control_for_control_packet(1e-3, 1.0, db_to_linear(8.0));
  CHECK(watts_to_dbm(p) == doctest::Approx(-8.0));
  double gC = 2.0, gD = db_to_linear(8.0) * 2.0;
  CHECK(communication_range(power_control_for_control_packet(1e-3, gC, gD), gC, 1e-13, 0.125, 3.0) ==
        doctest::Approx(communication_range(1e-3, gD, 1e-13, 0.125, 3.0)).epsilon(1e-12));
}

TEST_CASE("link budget orders the two thresholds") {
  auto b = link_budget(88, 1000, 0.1, flat(), qpsk_half(), qpsk_half(), 1e-3, 1e-13, 0.125, 3.0);
  CHECK(b.gamma_tC < b.gamma_tD);
  CHECK(b.n_T == static_cast<int>(std::ceil(b.gamma_tD / b.gamma_tC)));
  CHECK(b.range_control > b.range_data);
  CHECK(b.range_data > 0.0);
}

TEST_CASE("MRC-combined outage is no worse than a single control shot") {
  auto b = link_budget(88, 1000, 0.1, flat(), qpsk_half(), qpsk_half(), 1e-3, 1e-13, 0.125, 3.0);
  Philox rng(11, Stream::Oracle);
  const long n = 200000;
  long single = 0, combined = 0;
  for (long i = 0; i < n; ++i) {
    if (b.gamma_tC * rng.exponential() < b.gamma_tC) ++single;
    double s = 0.0;
    for (int t = 0; t < b.n_T; ++t) s += b.gamma_tC * rng.exponential();
    if (s < b.gamma_tD) ++combined;
  }
  // combined taps at the control-range mean reach the data threshold at
  // least as often as one tap reaches the control threshold
  CHECK(combined < single);
}

TEST_CASE("combined SINR laws") {
  FadingChannelModel equal{3, {1.0, 1.0, 1.0}};
  FadingChannelModel distinct{2, {1.0, 3.0}};
  for (const auto& ch : {equal, distinct}) {
    CHECK(combined_sinr_cdf(ch, 10.0, 0.0) == doctest::Approx(0.0));
    CHECK(combined_sinr_cdf(ch, 10.0, 1e4) == doctest::Approx(1.0));
    double h = 1e-4, s = 7.0;
    double numeric = (combined_sinr_cdf(ch, 10.0, s + h) - combined_sinr_cdf(ch, 10.0, s - h)) / (2 * h);
    CHECK(combined_sinr_pdf(ch, 10.0, s) == doctest::Approx(numeric).epsilon(1e-5));
  }
  FadingChannelModel mixed{3, {1.0, 1.0, 2.0}};
  CHECK_THROWS(mixed.validate());
  CHECK(q_function(0.0) == doctest::Approx(0.5));
  CHECK(gray_ber(Modulation::Qpsk, 1e6) < 1e-12);
}

TEST_CASE("quasi-static block: union bound against the bit-level decoder") {
  FadingChannelModel ch;
  ch.coherence_time = 1.0;  // one block per packet
  for (double db : {10.0, 16.0}) {
    double g = db_to_linear(db);
    auto mc = bit_level_per(512, g, ch, qpsk_half(), 100000, 21);
    double bound = per_coded_packet(512, g, ch, qpsk_half());
    MESSAGE("SINR " << db << " dB: bound " << bound << " MC " << mc.per << " +- " << mc.stderr_per);
    CHECK(bound >= mc.per - 3.0 * mc.stderr_per);
    CHECK(bound <= 2.0 * mc.per);
  }
}
