#include "georoute/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "georoute/convcode.hpp"
#include "georoute/hopstats.hpp"
#include "georoute/linkmodel.hpp"
#include "georoute/plotdata.hpp"
#include "georoute/protocols.hpp"
#include "georoute/rng.hpp"
#include "georoute/scenarios.hpp"
#include "georoute/simulator.hpp"

namespace georoute {

void CriterionResult::check(std::string name, bool ok, std::string detail) {
  lines.push_back({std::move(name), ok, std::move(detail)});
  if (!ok) pass = false;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

std::string name_of(Protocol p) { return std::string(protocol_name(p)); }

const std::vector<Protocol> kThree = {Protocol::GerafPc, Protocol::GerafMrc, Protocol::Boss};

// Results of a sweep indexed by (value position, protocol).
class Table {
 public:
  explicit Table(const SweepResult& r) {
    for (const auto& row : r.rows) {
      auto it = std::find(values_.begin(), values_.end(), row.value);
      std::size_t i = it - values_.begin();
      if (it == values_.end()) values_.push_back(row.value);
      cells_[{i, row.result.protocol}] = row.result;
    }
  }
  std::size_t size() const { return values_.size(); }
  const std::string& value(std::size_t i) const { return values_[i]; }
  const EndToEndResult& at(std::size_t i, Protocol p) const { return cells_.at({i, p}); }
  bool feasible() const {
    for (const auto& [k, v] : cells_)
      if (v.infeasible) return false;
    return true;
  }
  // Protocol with the smallest metric among the three at point i.
  template <class F>
  Protocol best(std::size_t i, F metric) const {
    Protocol b = kThree[0];
    for (Protocol p : kThree)
      if (metric(at(i, p)) < metric(at(i, b))) b = p;
    return b;
  }

 private:
  std::vector<std::string> values_;
  std::map<std::pair<std::size_t, Protocol>, EndToEndResult> cells_;
};

Table panel_table(const LayoutPanel& panel, unsigned threads) {
  ScenarioConfig base = preset(panel.preset);
  for (const auto& kv : panel.overrides) {
    auto eq = kv.find('=');
    set_config_value(base, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return Table(run_sweep(panel.sweep, base, threads));
}

double lpb(const EndToEndResult& r) { return r.delay_per_bit; }
double epb(const EndToEndResult& r) { return r.energy_per_bit; }
double delay(const EndToEndResult& r) { return r.l_e2e; }
double composite(const EndToEndResult& r) { return r.composite; }

std::string series(const Table& t, Protocol p, double (*m)(const EndToEndResult&)) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? " " : "") + fmt(m(t.at(i, p)));
  return s;
}

}  // namespace

BitLevelEstimate bit_level_per(long length_bits, double mean_sinr, const FadingChannelModel& channel,
                               const McsProfile& mcs, long packets, std::uint64_t seed) {
  if (length_bits < 1 || packets < 1) throw std::invalid_argument("need a positive length and packet count");
  channel.validate();
  ViterbiDecoder decoder(mcs.code_rate);
  const std::size_t coded_per_block =
      static_cast<std::size_t>(channel.symbols_per_block()) * static_cast<std::size_t>(mcs.coded_bits_per_symbol());
  double gain_sum = 0.0;
  for (double g : channel.mean_tap_gains) gain_sum += g;

  BitLevelEstimate est;
  est.packets = packets;
  std::vector<std::uint8_t> info(static_cast<std::size_t>(length_bits));
  for (long k = 0; k < packets; ++k) {
    Philox rng(seed, Stream::BitLevel, static_cast<std::uint64_t>(k));
    for (auto& b : info) b = static_cast<std::uint8_t>(rng.next_u32() & 1u);
    std::vector<std::uint8_t> coded = encode(info, mcs.code_rate);
    bool flipped = false;
    for (std::size_t start = 0; start < coded.size(); start += coded_per_block) {
      double gamma = 0.0;
      for (double g : channel.mean_tap_gains) gamma += mean_sinr * g / gain_sum * rng.exponential();
      double p = gray_ber(mcs.modulation, gamma);
      std::size_t end = std::min(coded.size(), start + coded_per_block);
      if (!(p > 0.0)) continue;
      if (p >= 0.5) {
        for (std::size_t i = start; i < end; ++i)
          if (rng.bernoulli(p)) {
            coded[i] ^= 1u;
            flipped = true;
          }
        continue;
      }
      // geometric gaps between flipped bits
      const double log_q = std::log1p(-p);
      double pos = static_cast<double>(start) + std::floor(std::log(rng.uniform_pos()) / log_q);
      while (pos < static_cast<double>(end)) {
        coded[static_cast<std::size_t>(pos)] ^= 1u;
        flipped = true;
        pos += 1.0 + std::floor(std::log(rng.uniform_pos()) / log_q);
      }
    }
    // an error-free codeword always decodes to itself
    if (!flipped) continue;
    if (decoder.decode(coded, info.size()) != info) ++est.errors;
  }
  est.per = static_cast<double>(est.errors) / static_cast<double>(packets);
  est.stderr_per = std::sqrt(est.per * (1.0 - est.per) / static_cast<double>(packets));
  return est;
}

std::vector<OraclePoint> oracle_grid() {
  return {
      {0.05, 0.5, 4, 32},  {0.1, 0.1, 4, 32},  {0.5, 0.1, 4, 32},  {0.5, 0.1, 2, 8},
      {0.5, 0.1, 8, 64},   {1.0, 0.2, 6, 16, 20.0}, {2.0, 0.1, 4, 4},  {2.0, 0.5, 8, 32},
      {5.0, 0.1, 3, 16},   {5.0, 1.0, 12, 8},  {20.0, 0.05, 4, 32}, {10.0, 1.0, 16, 2},
  };
}

ScenarioConfig oracle_config(const OraclePoint& p) {
  ScenarioConfig c;
  c.name = "oracle";
  c.rho = p.rho;
  c.epsilon = p.epsilon;
  c.N = p.N;
  c.x = p.x;
  c.D = p.D;
  return c;
}

CriterionResult criterion_link_anchor() {
  CriterionResult r;
  r.id = 1;
  r.title = "link-model anchor";
  auto t0 = Clock::now();
  ScenarioConfig c;
  const long short_bits = c.control_bits(), long_bits = 20 * short_bits;
  auto growth = [&](double per) {
    return linear_to_db(solve_threshold(long_bits, per, c.channel, c.control_mcs)) -
           linear_to_db(solve_threshold(short_bits, per, c.channel, c.control_mcs));
  };
  double g20 = growth(0.2), g5 = growth(0.05);
  r.check("growth at PER 20% within 8 +- 1 dB", std::fabs(g20 - 8.0) <= 1.0,
          std::to_string(short_bits) + " -> " + std::to_string(long_bits) + " bits: " + fmt(g20) + " dB");
  r.check("growth at PER 5% strictly smaller", g5 < g20, fmt(g5) + " dB");
  r.seconds = seconds_since(t0);
  r.check("runtime below 10 s", r.seconds < 10.0, fmt(r.seconds) + " s");
  return r;
}

CriterionResult criterion_union_bound(const ValidationOptions& o) {
  CriterionResult r;
  r.id = 2;
  r.title = "union-bound soundness";
  auto t0 = Clock::now();
  FadingChannelModel ch;
  McsProfile qpsk{Modulation::Qpsk, CodeRate::Half};
  std::uint64_t seed = o.seed;
  for (long bits : {88L, 350L, 1000L}) {
    for (double db : {6.0, 12.0, 18.0}) {
      double mean = db_to_linear(db);
      double bound = per_coded_packet(bits, mean, ch, qpsk);
      BitLevelEstimate mc = bit_level_per(bits, mean, ch, qpsk, o.bit_packets, seed++);
      bool ok = bound >= mc.per - 3.0 * mc.stderr_per;
      r.check("L=" + std::to_string(bits) + " SINR=" + fmt(db) + " dB", ok,
              "bound " + fmt(bound) + " vs MC " + fmt(mc.per) + " +- " + fmt(mc.stderr_per) + " (" +
                  std::to_string(mc.errors) + "/" + std::to_string(mc.packets) + ")");
    }
  }
  r.seconds = seconds_since(t0);
  r.check("runtime below 5 min", r.seconds < 300.0, fmt(r.seconds) + " s");
  return r;
}

CriterionResult criterion_oracle_agreement(const ValidationOptions& o) {
  CriterionResult r;
  r.id = 3;
  r.title = "oracle agreement";
  auto t0 = Clock::now();
  double worst_z = 0.0, worst_rel = 0.0;
  std::string worst_z_at, worst_rel_at;
  bool stats_ok = true, ledger_ok = true;
  int point = 0;
  for (const auto& gp : oracle_grid()) {
    ++point;
    ScenarioConfig cfg = oracle_config(gp);
    LinkBudget link = link_budget_for(cfg);
    std::string where = "point " + std::to_string(point) + " (rho=" + fmt(gp.rho) + " eps=" + fmt(gp.epsilon) +
                        " N=" + std::to_string(gp.N) + " x=" + std::to_string(gp.x) + " D=" + fmt(gp.D) + ")";
    for (Protocol p : kAllProtocols) {
      OperatingPoint op = operating_point(p, cfg, link);
      ProtocolLedger ledger = build_ledger(op, cfg);
      const HopStatistics& h = op.stats;
      EmpiricalStatistics s = estimate_statistics(cfg, p, o.oracle_trials, o.seed, 0, o.threads);
      const double n = static_cast<double>(std::max(1L, s.trials - s.outages));
      auto stat = [&](const std::string& what, double analytic, const Estimate& e) {
        // a sample with no spread falls back to the Poisson scale of the analytical value
        double se = e.stderr_mean > 0.0 ? e.stderr_mean : std::sqrt(std::max(analytic, 0.0) / n);
        double z = se > 0.0 ? (e.mean - analytic) / se : (e.mean == analytic ? 0.0 : std::numeric_limits<double>::infinity());
        bool ok = std::fabs(z) <= 3.0;
        if (std::fabs(z) > worst_z) {
          worst_z = std::fabs(z);
          worst_z_at = where + " " + name_of(p) + " " + what;
        }
        stats_ok = stats_ok && ok;
        if (!ok)
          r.check(where + " " + name_of(p) + " " + what, false,
                  "analytical " + fmt(analytic, 6) + " vs " + fmt(e.mean, 6) + " +- " + fmt(se, 3) + " (z=" + fmt(z, 3) + ")");
      };
      auto ledger_check = [&](const std::string& what, double analytic, const Estimate& e) {
        double rel = (e.mean - analytic) / analytic;
        if (std::fabs(rel) > worst_rel) {
          worst_rel = std::fabs(rel);
          worst_rel_at = where + " " + name_of(p) + " " + what;
        }
        ledger_ok = ledger_ok && std::fabs(rel) <= 0.05;
        if (std::fabs(rel) > 0.05)
          r.check(where + " " + name_of(p) + " " + what, false,
                  "ledger " + fmt(analytic, 6) + " vs " + fmt(e.mean, 6) + " (" + fmt(100 * rel, 3) + "%)");
      };
      if (s.outages > 0) r.check(where + " " + name_of(p) + " outages", false, std::to_string(s.outages));
      stat("E[eta]", h.mean_eta, s.eta);
      stat("E[m_e]", h.mean_me, s.me);
      if (p == Protocol::GerafPc || p == Protocol::GerafMrc) stat("E[m_n]", h.mean_mn, s.mn);
      if (p == Protocol::Boss) {
        stat("p_NPA", h.p_npa, s.p_npa);
        stat("p_c", h.p_c, s.p_c);
        // retries reuse the contenders, so the exact law is the mixture
        stat("E[eta']", h.mean_eta_prime_mixture, s.eta_prime);
      }
      ledger_check("E_hop", ledger.e_hop, s.e_hop);
      ledger_check("l_hop", ledger.l_hop, s.l_hop);
    }
  }
  r.check("statistics within 3 standard errors", stats_ok,
          "largest |z| = " + fmt(worst_z, 3) + " at " + worst_z_at);
  r.check("ledger energy and delay within 5%", ledger_ok,
          "largest deviation " + fmt(100 * worst_rel, 3) + "% at " + worst_rel_at);
  r.seconds = seconds_since(t0);
  r.check("runtime below 10 min", r.seconds < 600.0, fmt(r.seconds) + " s");
  return r;
}

CriterionResult criterion_density_trends(const ValidationOptions& o) {
  CriterionResult r;
  r.id = 4;
  r.title = "density sweep trends";
  auto t0 = Clock::now();
  Table t = panel_table(layout_panels("fig3").front(), o.threads);
  r.check("all points feasible", t.feasible());
  const std::size_t lo = 0, hi = t.size() - 1, mid = t.size() / 2;
  r.check("sweep spans two decades", std::stod(t.value(hi)) / std::stod(t.value(lo)) >= 100.0,
          t.value(lo) + " .. " + t.value(hi));
  r.check("(a) GeRaF-MRC lowest delay at the lowest density", t.best(lo, delay) == Protocol::GerafMrc,
          "pc " + fmt(t.at(lo, Protocol::GerafPc).l_e2e) + " mrc " + fmt(t.at(lo, Protocol::GerafMrc).l_e2e) +
              " boss " + fmt(t.at(lo, Protocol::Boss).l_e2e));
  double mrc_ratio = t.at(lo, Protocol::GerafMrc).l_e2e / t.at(lo, Protocol::RtsCtsDataOpt).l_e2e;
  r.check("(a) GeRaF-MRC delay within 15% of opt", mrc_ratio <= 1.15, "ratio " + fmt(mrc_ratio));
  r.check("(b) BOSS lowest delay at the highest density", t.best(hi, delay) == Protocol::Boss,
          "pc " + fmt(t.at(hi, Protocol::GerafPc).l_e2e) + " mrc " + fmt(t.at(hi, Protocol::GerafMrc).l_e2e) +
              " boss " + fmt(t.at(hi, Protocol::Boss).l_e2e));
  bool pc_energy = true;
  for (std::size_t i = mid; i <= hi; ++i) pc_energy = pc_energy && t.best(i, epb) == Protocol::GerafPc;
  r.check("(c) GeRaF-PC lowest energy per bit from rho=" + t.value(mid) + " upward", pc_energy,
          "pc " + series(t, Protocol::GerafPc, epb) + " | boss " + series(t, Protocol::Boss, epb));
  double pc_ratio = t.at(hi, Protocol::GerafPc).energy_per_bit / t.at(hi, Protocol::RtsCtsDataOpt).energy_per_bit;
  r.check("(c) GeRaF-PC energy per bit within 10% of opt at the top", pc_ratio <= 1.10, "ratio " + fmt(pc_ratio));
  r.check("(d) GeRaF-PC lowest composite cost at the highest density", t.best(hi, composite) == Protocol::GerafPc,
          "pc " + fmt(t.at(hi, Protocol::GerafPc).composite) + " mrc " + fmt(t.at(hi, Protocol::GerafMrc).composite) +
              " boss " + fmt(t.at(hi, Protocol::Boss).composite));
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult criterion_vanet(const ValidationOptions& o) {
  CriterionResult r;
  r.id = 5;
  r.title = "VANET scenario";
  auto t0 = Clock::now();
  auto panels = layout_panels("fig4");
  Table dens = panel_table(panels[0], o.threads);
  Table pow = panel_table(panels[1], o.threads);
  r.check("all points feasible", dens.feasible() && pow.feasible());
  ScenarioConfig v = preset("vanet");
  r.check("preset has epsilon=1 and phi=0.2", v.epsilon == 1.0 && v.phi == 0.2);
  // medium densities: the grid without its two lowest and two highest points
  bool boss_best = true;
  std::string detail;
  for (std::size_t i = 2; i + 2 < dens.size(); ++i) {
    boss_best = boss_best && dens.best(i, composite) == Protocol::Boss;
    detail += "rho=" + dens.value(i) + ": " + name_of(dens.best(i, composite)) + " ";
  }
  r.check("BOSS lowest composite cost at medium densities", boss_best, detail);
  bool mono = true, close = true;
  for (std::size_t i = 1; i < pow.size(); ++i)
    mono = mono && pow.at(i, Protocol::Boss).composite <= pow.at(i - 1, Protocol::Boss).composite;
  for (std::size_t i = 0; i < pow.size(); ++i)
    if (std::stod(pow.value(i)) >= 22.0) close = close && std::fabs(pow.at(i, Protocol::Boss).composite - 1.0) <= 0.2;
  r.check("BOSS composite non-increasing over 10..25 dBm", mono, series(pow, Protocol::Boss, composite));
  r.check("BOSS within 20% of opt from 22 dBm", close);
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult criterion_rescue(const ValidationOptions& o) {
  CriterionResult r;
  r.id = 6;
  r.title = "rescue scenario";
  auto t0 = Clock::now();
  Table t = panel_table(layout_panels("fig5").front(), o.threads);
  ScenarioConfig c = preset("rescue");
  r.check("preset has T_p=10 ms and phi=0.6", c.T_p == 10e-3 && c.phi == 0.6);
  r.check("all points feasible", t.feasible());
  for (Protocol p : kThree) {
    bool inc = true;
    for (std::size_t i = 1; i < t.size(); ++i) inc = inc && t.at(i, p).l_e2e > t.at(i - 1, p).l_e2e;
    r.check("delay increases with MCS rank for " + name_of(p), inc, series(t, p, delay));
  }
  bool fastest = true;
  for (std::size_t i = t.size() - 2; i < t.size(); ++i) {
    double d_mrc = t.at(i, Protocol::GerafMrc).composite - t.at(i - 1, Protocol::GerafMrc).composite;
    for (Protocol p : {Protocol::GerafPc, Protocol::Boss})
      fastest = fastest && d_mrc > t.at(i, p).composite - t.at(i - 1, p).composite;
  }
  r.check("GeRaF-MRC composite degrades fastest at the two highest ranks", fastest,
          "mrc " + series(t, Protocol::GerafMrc, composite));
  bool pc_best = true;
  for (std::size_t i = 0; i < t.size(); ++i) pc_best = pc_best && t.best(i, composite) == Protocol::GerafPc;
  r.check("GeRaF-PC lowest composite cost at every rank", pc_best,
          "pc " + series(t, Protocol::GerafPc, composite) + " | boss " + series(t, Protocol::Boss, composite));
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult criterion_optimizer(const ValidationOptions&) {
  CriterionResult r;
  r.id = 7;
  r.title = "subarea optimizer";
  auto t0 = Clock::now();
  int prev = 0;
  bool nondecreasing = true;
  std::string ns;
  for (const auto& panel : layout_panels("fig6")) {
    ScenarioConfig base = preset(panel.preset);
    for (const auto& kv : panel.overrides) {
      auto eq = kv.find('=');
      set_config_value(base, kv.substr(0, eq), kv.substr(eq + 1));
    }
    std::vector<int> range;
    for (const auto& v : panel.sweep.values) range.push_back(std::stoi(v));
    OptimizationResult opt = optimize_subareas(base, Protocol::GerafPc, range, Metric::Composite);
    nondecreasing = nondecreasing && opt.best_N >= prev;
    prev = opt.best_N;
    ns += "rho=" + format_number(base.rho) + ":N*=" + std::to_string(opt.best_N) + " ";
    // unimodal: non-increasing up to the minimum, non-decreasing after it
    bool unimodal = true;
    for (std::size_t i = 1; i < opt.curve.size(); ++i) {
      bool before = opt.curve[i].first <= opt.best_N;
      double d = opt.curve[i].second - opt.curve[i - 1].second;
      unimodal = unimodal && (before ? d <= 0.0 : d >= 0.0);
    }
    r.check("curve over N unimodal at rho=" + format_number(base.rho), unimodal);
  }
  r.check("optimal N non-decreasing in density", nondecreasing, ns);
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult criterion_packet_length(const ValidationOptions& o) {
  CriterionResult r;
  r.id = 8;
  r.title = "packet-length sweep";
  auto t0 = Clock::now();
  Table t = panel_table(layout_panels("fig7").front(), o.threads);
  r.check("all points feasible", t.feasible());
  for (Protocol p : kThree) {
    bool dec = true, diverge = true;
    for (std::size_t i = 1; i < t.size(); ++i) {
      dec = dec && t.at(i, p).delay_per_bit < t.at(i - 1, p).delay_per_bit;
      double now = t.at(i, p).l_e2e / t.at(i, Protocol::RtsCtsDataOpt).l_e2e;
      double before = t.at(i - 1, p).l_e2e / t.at(i - 1, Protocol::RtsCtsDataOpt).l_e2e;
      diverge = diverge && now > before;
    }
    r.check("delay per bit decreasing for " + name_of(p), dec, series(t, p, lpb));
    r.check("delay ratio to opt increasing for " + name_of(p), diverge);
  }
  bool pc = true, boss = true;
  for (std::size_t i = 1; i < t.size(); ++i) {
    pc = pc && t.at(i, Protocol::GerafPc).energy_per_bit <= t.at(i - 1, Protocol::GerafPc).energy_per_bit;
    boss = boss && t.at(i, Protocol::Boss).energy_per_bit > t.at(i - 1, Protocol::Boss).energy_per_bit;
  }
  r.check("GeRaF-PC energy per bit non-increasing", pc, series(t, Protocol::GerafPc, epb));
  r.check("BOSS energy per bit increasing", boss, series(t, Protocol::Boss, epb));
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult criterion_spot_checks(const ValidationOptions& o) {
  CriterionResult r;
  r.id = 9;
  r.title = "exactness spot checks";
  auto t0 = Clock::now();
  Philox rng(o.seed, Stream::Oracle, 9);
  int agree = 0;
  for (int i = 0; i < 20; ++i) {
    double gC = db_to_linear(20.0 * rng.uniform());
    double gD = gC * db_to_linear(-3.0 + 20.0 * rng.uniform());
    int n = 1;
    while (n * gC < gD) ++n;
    if (mrc_transmission_count(gD, gC) == n) ++agree;
  }
  r.check("n_T on 20 random threshold pairs", agree == 20, std::to_string(agree) + "/20 agree");

  ScenarioConfig c;
  LinkBudget link = link_budget_for(c);
  const double R = link.range_data;
  for (double d : {std::numeric_limits<double>::infinity(), 1.5 * R}) {
    double zeta = std::isinf(d) ? 0.5 : ppa_area(R, d) / (std::numbers::pi * R * R);
    double disk = c.epsilon * c.rho * std::numbers::pi * R * R;
    long hits = 0;
    for (long k = 0; k < o.spot_draws; ++k) {
      auto in_ppa = rng.poisson(zeta * disk);
      auto in_npa = rng.poisson((1.0 - zeta) * disk);
      if (in_ppa == 0 && in_npa > 0) ++hits;
    }
    double p = static_cast<double>(hits) / o.spot_draws;
    double closed = boss_npa_probability(c.rho, c.epsilon, R, zeta);
    double se = std::sqrt(closed * (1.0 - closed) / o.spot_draws);
    r.check("p_NPA closed form vs two-region Poisson MC, zeta=" + fmt(zeta), std::fabs(p - closed) <= 3.0 * se,
            "closed " + fmt(closed, 6) + " vs " + fmt(p, 6) + " +- " + fmt(se, 3));
  }

  bool exact = true;
  for (int x = 2; x <= 8; ++x) {
    long same = 0;
    for (int a = 0; a < x; ++a)
      for (int b = 0; b < x; ++b) same += a == b;
    double enumerated = static_cast<double>(same) / (x * x);
    exact = exact && std::fabs(enumerated - 1.0 / x) < 1e-15 &&
            std::fabs(boss_collision_given(2, x) - enumerated) < 1e-12 &&
            std::fabs(boss_round_moments(2, x).p_collision - enumerated) < 1e-12;
  }
  r.check("p_c|2,x = 1/x by enumeration for x = 2..8", exact);
  r.seconds = seconds_since(t0);
  return r;
}

namespace {

std::map<std::string, std::string> read_tree(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[std::filesystem::relative(e.path(), dir).string()] = ss.str();
  }
  return files;
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char ch : s) q += ch == '\'' ? std::string("'\\''") : std::string(1, ch);
  return q + "'";
}

}  // namespace

CriterionResult criterion_determinism(const ValidationOptions& o) {
  CriterionResult r;
  r.id = 10;
  r.title = "determinism";
  auto t0 = Clock::now();
  if (o.cli_path.empty()) {
    r.check("CLI path available", false, "no CLI binary given");
    return r;
  }
  namespace fs = std::filesystem;
  fs::path root = fs::temp_directory_path() / ("georoute-determinism-" + std::to_string(o.seed));
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"evaluate", "evaluate --set rho=1 --protocols all"},
      {"sweep", "sweep --param rho --values 0.1,1 --protocols all --layout custom --metrics composite,delay"},
      {"optimize", "optimize --set rho=1 --protocols geraf-pc"},
      {"simulate", "simulate --set D=30 --protocols all --trials 20 --seed 5"},
      {"scenarios", "scenario-list"},
  };
  for (const auto& [name, args] : runs) {
    std::map<std::string, std::string> first;
    bool same = true, ran = true;
    for (int rep = 0; rep < 2; ++rep) {
      fs::path dir = root / (name + std::to_string(rep));
      fs::create_directories(dir);
      std::string cmd = quote(o.cli_path) + " " + args + " --out " + quote(dir.string()) + " > " +
                        quote((dir / "stdout.txt").string()) + " 2>&1";
      int rc = std::system(cmd.c_str());
      ran = ran && rc == 0;
      auto tree = read_tree(dir);
      if (rep == 0) first = tree;
      else same = tree == first;
    }
    r.check(name + " repeated run byte-identical", ran && same && first.size() > 1,
            std::to_string(first.size()) + " files" + (ran ? "" : ", command failed"));
  }
  fs::remove_all(root);
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult run_criterion(int id, const ValidationOptions& o) {
  auto t0 = Clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = criterion_link_anchor(); break;
      case 2: r = criterion_union_bound(o); break;
      case 3: r = criterion_oracle_agreement(o); break;
      case 4: r = criterion_density_trends(o); break;
      case 5: r = criterion_vanet(o); break;
      case 6: r = criterion_rescue(o); break;
      case 7: r = criterion_optimizer(o); break;
      case 8: r = criterion_packet_length(o); break;
      case 9: r = criterion_spot_checks(o); break;
      case 10: r = criterion_determinism(o); break;
      default: throw std::invalid_argument("criteria are numbered 1 to 10");
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    r.id = id;
    r.title = "criterion " + std::to_string(id);
    r.check("ran to completion", false, e.what());
  }
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<CheckLine> dominance_report() {
  std::vector<CheckLine> out;
  for (const auto& name : preset_names()) {
    Evaluation ev = evaluate(preset(name), kThree);
    const EndToEndResult* opt = ev.find(Protocol::RtsCtsDataOpt);
    if (ev.infeasible || !opt) {
      out.push_back({name, false, "infeasible: " + ev.reason});
      continue;
    }
    std::string beats;
    for (Protocol p : kThree) {
      const EndToEndResult* e = ev.find(p);
      if (e->e_e2e < opt->e_e2e) beats += name_of(p) + " energy x" + fmt(e->e_e2e / opt->e_e2e, 3) + "; ";
      if (e->l_e2e < opt->l_e2e) beats += name_of(p) + " delay x" + fmt(e->l_e2e / opt->l_e2e, 3) + "; ";
    }
    out.push_back({name, beats.empty(), beats.empty() ? "opt dominates" : "below opt: " + beats});
  }
  return out;
}

std::string format_criterion(const CriterionResult& r, bool verbose) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.title << " (" << fmt(r.seconds, 3)
     << " s)\n";
  for (const auto& l : r.lines) {
    if (!verbose && l.pass) continue;
    os << "    " << (l.pass ? "ok  " : "FAIL") << ' ' << l.name;
    if (!l.detail.empty()) os << ": " << l.detail;
    os << '\n';
  }
  return os.str();
}

}  // namespace georoute
