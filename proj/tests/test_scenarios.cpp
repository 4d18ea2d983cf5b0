#include <doctest.h>

#include "georoute/scenarios.hpp"

using namespace georoute;

TEST_CASE("presets carry their stated constraints") {
  auto v = preset("vanet");
  CHECK(v.epsilon == 1.0);
  CHECK(v.phi == 0.2);
  CHECK(v.channel.multipath_count > 1);
  auto r = preset("rescue");
  CHECK(r.T_p == doctest::Approx(10e-3));
  CHECK(r.phi == 0.6);
  CHECK(r.epsilon == 1.0);
  CHECK(preset("environmental").phi == 0.5);
  CHECK(preset("sun").epsilon < preset("environmental").epsilon);
  for (const auto& name : preset_names()) {
    auto p = preset(name);
    CHECK(p.name == name);
    CHECK_NOTHROW(p.validate());
  }
  CHECK_THROWS_AS(preset("moon"), std::invalid_argument);
}

TEST_CASE("evaluate appends the opt baseline") {
  auto ev = evaluate(ScenarioConfig{}, {Protocol::GerafPc, Protocol::Boss});
  REQUIRE(ev.results.size() == 3);
  CHECK(ev.results[2].protocol == Protocol::RtsCtsDataOpt);
  CHECK(ev.find(Protocol::RtsCtsDataOpt)->composite == 1.0);
  for (const auto& r : ev.results) {
    CHECK_FALSE(r.infeasible);
    CHECK(r.hops >= ScenarioConfig{}.D / ev.link.range_control);
  }
}

TEST_CASE("infeasible points are marked, not dropped") {
  ScenarioConfig cfg;
  cfg.T_p = 1.0;
  cfg.per_target = 1e-3;
  auto ev = evaluate(cfg, {Protocol::GerafPc});
  CHECK(ev.infeasible);
  CHECK(!ev.reason.empty());
  SweepSpec spec{"per_target", {"0.1", "0.001"}, {Protocol::GerafPc, Protocol::Boss}};
  ScenarioConfig base;
  base.T_p = 1.0;
  auto table = run_sweep(spec, base, 1);
  CHECK(table.rows.size() == 2 * 3);
  int infeasible = 0;
  for (const auto& row : table.rows) infeasible += row.result.infeasible;
  CHECK(infeasible >= 3);
}

TEST_CASE("sweeps") {
  ScenarioConfig base;
  SweepSpec spec{"rho", {"0.1", "1"}, {Protocol::GerafPc, Protocol::GerafMrc, Protocol::Boss}};
  auto a = run_sweep(spec, base, 1);
  auto b = run_sweep(spec, base, 2);
  REQUIRE(a.rows.size() == 8);
  CHECK(sweep_csv(a) == sweep_csv(b));
  CHECK(a.rows[0].value == "0.1");
  CHECK(a.rows[3].result.protocol == Protocol::RtsCtsDataOpt);
  CHECK(sweep_csv(a).rfind(sweep_csv_header(), 0) == 0);
  CHECK(sweep_csv_header() ==
        "param,protocol,E_hop_J,l_hop_s,q,E_e2e_J,l_e2e_s,E_per_bit,l_per_bit,C_e2e,infeasible");

  // a single-value sweep equals a direct evaluation
  SweepSpec one{"rho", {"0.5"}, {Protocol::Boss}};
  auto s = run_sweep(one, base, 1);
  auto ev = evaluate(base, {Protocol::Boss});
  CHECK(s.rows[0].result.e_e2e == ev.results[0].e_e2e);
  CHECK(s.rows[0].result.l_e2e == ev.results[0].l_e2e);
  CHECK_THROWS_AS(run_sweep({"nonsense", {"1"}, {Protocol::Boss}}, base, 1), std::invalid_argument);
}

TEST_CASE("subarea optimizer") {
  ScenarioConfig base = preset("environmental");
  auto one = optimize_subareas(base, Protocol::GerafPc, {5}, Metric::Composite);
  CHECK(one.best_N == 5);
  CHECK(one.curve.size() == 1);
  std::vector<int> range;
  for (int n = 1; n <= 8; ++n) range.push_back(n);
  int prev = 0;
  for (double rho : {0.01, 1.0, 100.0}) {
    base.rho = rho;
    auto r = optimize_subareas(base, Protocol::GerafPc, range, Metric::Composite);
    CHECK(r.best_N >= prev);
    prev = r.best_N;
    if (rho == 0.01) {
      // smallest local optimum
      int local = range.back();
      for (std::size_t i = 0; i + 1 < r.curve.size(); ++i)
        if (r.curve[i].second <= r.curve[i + 1].second) {
          local = r.curve[i].first;
          break;
        }
      CHECK(r.best_N == local);
    }
  }
  CHECK(parse_metric("delay") == Metric::Delay);
  auto g = log_grid(0.01, 100.0, 5);
  CHECK(g.front() == doctest::Approx(0.01));
  CHECK(g[2] == doctest::Approx(1.0));
  CHECK(g.back() == doctest::Approx(100.0));
}
