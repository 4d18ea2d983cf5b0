#include <doctest.h>

#include <cmath>

#include "georoute/scenarios.hpp"
#include "georoute/simulator.hpp"

using namespace georoute;

namespace {
ScenarioConfig small() {
  ScenarioConfig c;
  c.D = 60.0;
  return c;
}
}  // namespace

TEST_CASE("identical seeds give bit-identical event logs") {
  SimOptions opt;
  opt.record_events = true;
  opt.record_positions = true;
  for (Protocol p : kAllProtocols) {
    auto a = simulate_route(small(), p, 7, 3, opt);
    auto b = simulate_route(small(), p, 7, 3, opt);
    CHECK(event_log_csv(a.trace.event_log) == event_log_csv(b.trace.event_log));
    CHECK(a.trace.node_positions.size() == b.trace.node_positions.size());
    CHECK(a.energy == b.energy);
    auto c = simulate_route(small(), p, 7, 4, opt);
    CHECK(event_log_csv(c.trace.event_log) != event_log_csv(a.trace.event_log));
  }
}

TEST_CASE("energy is conserved in the event log") {
  SimOptions opt;
  opt.record_events = true;
  for (Protocol p : kAllProtocols) {
    auto r = simulate_route(small(), p, 11, 0, opt);
    REQUIRE_FALSE(r.outage);
    double sum = 0.0, last = 0.0;
    for (const auto& e : r.trace.event_log) {
      CHECK(e.energy >= 0.0);
      CHECK(e.time >= last);
      last = e.time;
      sum += e.energy;
    }
    CHECK(sum == doctest::Approx(r.energy).epsilon(1e-12));
    CHECK(last <= r.delay * (1 + 1e-12));
    double hop_delay = 0.0;
    for (const auto& h : r.trace.hop_trace) hop_delay += h.delay;
    CHECK(hop_delay == doctest::Approx(r.delay).epsilon(1e-12));
    CHECK(r.hops == static_cast<long>(r.trace.hop_trace.size()));
  }
  auto csv = event_log_csv({});
  CHECK(csv == "time_s,node_id,activity_label,power_w,energy_j\n");
}

TEST_CASE("a single relay at full progress gives the contention-free delay") {
  ScenarioConfig cfg;
  cfg.D = 1000.0;
  LinkBudget link = link_budget_for(cfg);
  for (Protocol p : {Protocol::GerafPc, Protocol::GerafMrc, Protocol::RtsCtsDataOpt}) {
    OperatingPoint op = operating_point(p, cfg, link);
    SimOptions opt;
    opt.record_events = false;
    opt.field = [](double R, double, std::vector<double>& xs, std::vector<double>& ys) {
      xs.assign(1, R * (1.0 - 1e-9));
      ys.assign(1, 0.0);
    };
    auto r = simulate_route(cfg, p, 1, 0, opt);
    REQUIRE_FALSE(r.outage);
    CHECK(r.cycles == r.hops);
    double per_hop = p == Protocol::RtsCtsDataOpt ? opt_delay(0, 0, cfg.N, cfg.T_c, cfg.T_p)
                                                  : geraf_delay(0, 0, 0, cfg.N, op.T_s, p == Protocol::GerafMrc ? op.n_T : 1, cfg.T_p);
    CHECK(r.hops == static_cast<long>(std::ceil(cfg.D / (op.range * (1.0 - 1e-9)))));
    CHECK(r.delay == doctest::Approx(r.hops * per_hop).epsilon(1e-9));
  }
}

TEST_CASE("outage vanishes as the field gets denser") {
  ScenarioConfig cfg = small();
  cfg.D = 20.0;
  cfg.cycle_budget = 40;
  double prev = 1.1;
  for (double rho : {0.5, 2.0, 5.0, 20.0, 100.0}) {
    cfg.rho = rho;
    auto s = simulate_routes(cfg, Protocol::GerafPc, 400, 3, 1);
    double rate = static_cast<double>(s.outages) / s.trials;
    if (rho == 0.5) CHECK(rate > 0.5);
    CHECK(rate <= prev);
    prev = rate;
  }
  CHECK(prev == 0.0);
}

TEST_CASE("dense limit has no empty cycles") {
  ScenarioConfig cfg;
  cfg.rho = 20.0;
  cfg.epsilon = 1.0;
  auto s = estimate_statistics(cfg, Protocol::GerafPc, 1000, 1, 0, 1);
  CHECK(s.eta.mean == 0.0);
  CHECK(s.outages == 0);
  CHECK_THROWS_AS(estimate_statistics(cfg, Protocol::GerafPc, 999, 1), std::invalid_argument);
}

TEST_CASE("results do not depend on the thread count") {
  ScenarioConfig cfg = small();
  auto a = simulate_routes(cfg, Protocol::Boss, 200, 9, 1);
  auto b = simulate_routes(cfg, Protocol::Boss, 200, 9, 3);
  CHECK(a.energy.mean == b.energy.mean);
  CHECK(a.delay.mean == b.delay.mean);
  CHECK(a.hops.mean == b.hops.mean);
  CHECK(a.outages == b.outages);
}

TEST_CASE("simulated routes track the analytical end-to-end cost") {
  ScenarioConfig cfg;
  auto ev = evaluate(cfg, {Protocol::GerafPc});
  auto s = simulate_routes(cfg, Protocol::GerafPc, 4000, 1);
  const auto* r = ev.find(Protocol::GerafPc);
  CHECK(s.delay.mean == doctest::Approx(r->l_e2e).epsilon(0.05));
  CHECK(s.energy.mean == doctest::Approx(r->e_e2e).epsilon(0.05));
}
