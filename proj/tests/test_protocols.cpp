#include <doctest.h>

#include <map>
#include <set>

#include "georoute/protocols.hpp"
#include "georoute/scenarios.hpp"

using namespace georoute;

TEST_CASE("closed-form delays with zeroed contention") {
  const double Tp = 4e-3, Tc = 0.352e-3, Ts = 2 * Tc;
  CHECK(geraf_delay(0, 0, 0, 4, Ts, 1, Tp) == doctest::Approx(Tp));
  CHECK(geraf_delay(0, 0, 0, 4, Ts, 3, Tp) == doctest::Approx(3 * Tp));
  double bTs = Tc / 32;
  CHECK(boss_delay(0, 0, 1, 0, 0, 32, 4, bTs, Tp) == doctest::Approx(Tp + 2 * bTs));
  CHECK(opt_delay(0, 0, 4, Tc, Tp) == doctest::Approx(3 * Tc + Tp));
  CHECK(opt_delay(1, 0, 4, Tc, Tp) == doctest::Approx(11 * Tc + Tp));
}

TEST_CASE("ledgers carry the tabulated activity counts") {
  ScenarioConfig cfg;
  LinkBudget link = link_budget_for(cfg);
  std::map<Protocol, std::size_t> expected = {
      {Protocol::GerafMrc, 17}, {Protocol::Boss, 21}, {Protocol::RtsCtsDataOpt, 11}};
  const std::set<std::string> powers = {"P_tC", "P_tD", "P_Rx", "P_tBT", "P_Rx+P_tBT", "P_tC/2", "P_tC/(2xN)",
                                        "(P_tC+P_Rx+P_tBT)/2"};
  for (Protocol p : kAllProtocols) {
    auto ledger = build_ledger(operating_point(p, cfg, link), cfg);
    if (expected.count(p)) {
      std::set<int> ids;
      for (const auto& r : ledger.rows) ids.insert(r.id);
      CHECK(ids.size() == expected[p]);
    }
    double sum = 0.0;
    for (const auto& r : ledger.rows) {
      CHECK(r.energy() >= 0.0);
      CHECK(powers.count(r.power_label) == 1);
      sum += r.energy();
    }
    CHECK(ledger.e_hop == doctest::Approx(sum));
    CHECK(ledger.l_hop >= cfg.T_p);
    if (p == Protocol::GerafMrc) CHECK(ledger.l_hop >= link.n_T * cfg.T_p);
    CHECK(!serialize_ledger(ledger).empty());
  }
}

TEST_CASE("zeroed statistics reduce the ledgers to their fixed parts") {
  ScenarioConfig cfg;
  cfg.averaging = Averaging::PlugIn;
  LinkBudget link = link_budget_for(cfg);
  auto zero = [](OperatingPoint op) {
    op.stats.mean_eta = op.stats.mean_me = op.stats.mean_mn = 0.0;
    op.stats.mean_me_fine = op.stats.mean_eta_prime = op.stats.p_npa = op.stats.p_c = 0.0;
    op.stats.p_ppa = 1.0;
    return op;
  };
  auto pc = build_ledger(zero(operating_point(Protocol::GerafPc, cfg, link)), cfg);
  CHECK(pc.l_hop == doctest::Approx(cfg.T_p));
  auto mrc_op = zero(operating_point(Protocol::GerafMrc, cfg, link));
  auto mrc = build_ledger(mrc_op, cfg);
  CHECK(mrc.l_hop == doctest::Approx(mrc_op.n_T * cfg.T_p));
  auto boss_op = zero(operating_point(Protocol::Boss, cfg, link));
  CHECK(build_ledger(boss_op, cfg).l_hop == doctest::Approx(cfg.T_p + 2 * boss_op.T_s));
  auto opt = build_ledger(zero(operating_point(Protocol::RtsCtsDataOpt, cfg, link)), cfg);
  CHECK(opt.l_hop == doctest::Approx(3 * cfg.T_c + cfg.T_p));

  // all-NPA branch: the PPA rows carry no weight
  auto npa_op = boss_op;
  npa_op.stats.p_npa = 1.0;
  npa_op.stats.p_ppa = 0.0;
  auto only_npa = build_ledger(npa_op, cfg);
  CHECK(only_npa.l_hop == doctest::Approx(cfg.T_p + (cfg.boss_empty_window * cfg.x * cfg.N + 1) * boss_op.T_s));
}

TEST_CASE("range gap closure") {
  ScenarioConfig cfg;
  LinkBudget link = link_budget_for(cfg);
  auto pc = operating_point(Protocol::GerafPc, cfg, link);
  CHECK(communication_range(pc.P_tC, link.gamma_tC, cfg.P_n, cfg.wavelength, cfg.alpha) ==
        doctest::Approx(pc.range).epsilon(1e-12));
  CHECK(communication_range(pc.P_tD, link.gamma_tD, cfg.P_n, cfg.wavelength, cfg.alpha) ==
        doctest::Approx(pc.range).epsilon(1e-12));
  auto mrc = operating_point(Protocol::GerafMrc, cfg, link);
  CHECK(mrc.range == doctest::Approx(link.range_control));
  CHECK(mrc.n_T == link.n_T);
}

TEST_CASE("composite cost") {
  ProtocolLedger ledger;
  ledger.protocol = Protocol::GerafPc;
  ledger.e_hop = 2.0;
  ledger.l_hop = 4.0;
  EndToEndResult base;
  base.e_e2e = 3.0;
  base.l_e2e = 3.0;
  auto r = end_to_end(ledger, 3.0, base, 0.5, 100);
  CHECK(r.e_e2e == doctest::Approx(6.0));
  CHECK(r.l_e2e == doctest::Approx(12.0));
  CHECK(r.composite == doctest::Approx(3.0));
  CHECK(end_to_end(ledger, 3.0, base, 0.0, 100).composite == doctest::Approx(4.0));
  // linear in phi
  double c0 = end_to_end(ledger, 3.0, base, 0.0, 100).composite;
  double c1 = end_to_end(ledger, 3.0, base, 1.0, 100).composite;
  CHECK(end_to_end(ledger, 3.0, base, 0.3, 100).composite == doctest::Approx(0.7 * c0 + 0.3 * c1));
  CHECK(r.energy_per_bit == doctest::Approx(0.06));

  ledger.protocol = Protocol::RtsCtsDataOpt;
  CHECK(end_to_end(ledger, 2.0, std::nullopt, 0.5, 10).composite == 1.0);
  ledger.protocol = Protocol::Boss;
  CHECK_THROWS_AS(end_to_end(ledger, 2.0, std::nullopt, 0.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(end_to_end(ledger, 0.5, base, 0.5, 10), std::invalid_argument);
}

TEST_CASE("end-to-end cost grows with distance") {
  ScenarioConfig cfg;
  double prev_e = 0.0, prev_l = 0.0;
  for (double D : {100.0, 200.0, 400.0}) {
    cfg.D = D;
    auto ev = evaluate(cfg, {Protocol::GerafPc});
    const auto* r = ev.find(Protocol::GerafPc);
    REQUIRE(r);
    CHECK(r->e_e2e > prev_e);
    CHECK(r->l_e2e > prev_l);
    prev_e = r->e_e2e;
    prev_l = r->l_e2e;
  }
}
