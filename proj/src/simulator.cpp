#include "georoute/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "georoute/kernels.hpp"
#include "georoute/rng.hpp"

namespace georoute {

namespace {

constexpr std::uint64_t kSourceId = 0;
constexpr std::uint64_t kDestinationId = 1;
constexpr std::uint64_t kFirstFieldId = 2;

struct Streams {
  Philox field;
  Philox split;
  Philox offsets;
  Streams(std::uint64_t seed, std::uint64_t trial)
      : field(seed, Stream::Field, trial), split(seed, Stream::Splitting, trial), offsets(seed, Stream::Offsets, trial) {}
};

// Sender-relative frame: unit vector u towards the destination.
struct Frame {
  Point origin;
  double ux = 1.0, uy = 0.0;
  Point to_world(double x, double y) const { return {origin.x + x * ux - y * uy, origin.y + x * uy + y * ux}; }
};

class Meter {
 public:
  explicit Meter(SimTrial* trace) : trace_(trace) {}

  double clock = 0.0;
  double energy = 0.0;

  void charge(std::uint64_t node, const char* label, double duration, double power, double weight = 1.0) {
    double e = weight * duration * power;
    energy += e;
    if (trace_) trace_->event_log.push_back({clock, node, label, power, e});
  }

  template <class Ids>
  void charge_each(const Ids& ids, std::uint64_t base, const char* label, double duration, double power,
                   double weight = 1.0) {
    for (auto i : ids) charge(base + static_cast<std::uint64_t>(i), label, duration, power, weight);
  }

 private:
  SimTrial* trace_;
};

struct Field {
  std::vector<double> xs, ys, prog;
  std::vector<int> ppa, npa;
  std::vector<int> slice;  // PPA slice per PPA entry
  std::uint64_t base = 0;
};

struct HopSetup {
  const ScenarioConfig* cfg = nullptr;
  const OperatingPoint* op = nullptr;
  const SlicingGeometry* geo = nullptr;  // bounds for slice membership
  double d = 0.0;                       // infinite in the far field
  Frame frame;
  std::uint64_t sender = kSourceId;
  bool terminal = false;
  long budget = 0;  // cycles left
};

struct HopResult {
  double x = 0.0, y = 0.0;  // relay, sender-relative
  std::uint64_t relay = 0;
  long cycles = 0;
  long empty_cycles = 0;
  long npa_cycles = 0;
  long collision_cycles = 0;
  long me = 0;
  long me_fine = 0;
  long mn = 0;
  long cts_tx = 0;
  bool first_collision = false;
  double energy = 0.0;
  double delay = 0.0;
  bool outage = false;
};

class HopEngine {
 public:
  HopEngine(Streams& s, Meter& m, const SimOptions& opt, SimTrial* trace, std::uint64_t& next_id)
      : s_(s), m_(m), opt_(opt), trace_(trace), next_id_(next_id) {}

  HopResult run(const HopSetup& h) {
    HopResult r;
    const double e0 = m_.energy, t0 = m_.clock;
    switch (h.op->protocol) {
      case Protocol::GerafPc:
      case Protocol::GerafMrc: geraf(h, r); break;
      case Protocol::Boss: boss(h, r); break;
      case Protocol::RtsCtsDataOpt: opt(h, r); break;
    }
    r.energy = m_.energy - e0;
    r.delay = m_.clock - t0;
    return r;
  }

 private:
  void draw(const HopSetup& h) {
    const double R = h.op->range;
    f_.xs.clear();
    f_.ys.clear();
    if (opt_.field) {
      opt_.field(R, h.d, f_.xs, f_.ys);
    } else {
      const ScenarioConfig& c = *h.cfg;
      auto n = s_.field.poisson(c.epsilon * c.rho * std::numbers::pi * R * R);
      f_.xs.resize(n);
      f_.ys.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        double r = R * std::sqrt(s_.field.uniform());
        double th = 2.0 * std::numbers::pi * s_.field.uniform();
        f_.xs[i] = r * std::cos(th);
        f_.ys[i] = r * std::sin(th);
      }
    }
    const std::size_t n = f_.xs.size();
    f_.prog.resize(n);
    if (std::isinf(h.d)) {
      std::copy(f_.xs.begin(), f_.xs.end(), f_.prog.begin());
    } else if (n > 0) {
      kernels::active().progress(f_.xs.data(), f_.ys.data(), n, h.d, 0.0, h.d, f_.prog.data());
    }
    f_.ppa.clear();
    f_.npa.clear();
    f_.slice.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (f_.prog[i] > 0.0) {
        f_.ppa.push_back(static_cast<int>(i));
        f_.slice.push_back(h.geo->ppa_slice(f_.prog[i]));
      } else {
        f_.npa.push_back(static_cast<int>(i));
      }
    }
    f_.base = next_id_;
    next_id_ += n;
    if (trace_ && opt_.record_positions)
      for (std::size_t i = 0; i < n; ++i) trace_->node_positions.push_back(h.frame.to_world(f_.xs[i], f_.ys[i]));
  }

  int first_slice() const { return *std::min_element(f_.slice.begin(), f_.slice.end()); }

  std::vector<int> slice_members(int k) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < f_.ppa.size(); ++i)
      if (f_.slice[i] == k) out.push_back(f_.ppa[i]);
    return out;
  }

  void set_relay(const HopSetup& h, HopResult& r, int idx) {
    r.x = f_.xs[idx];
    r.y = f_.ys[idx];
    r.relay = h.terminal ? kDestinationId : f_.base + static_cast<std::uint64_t>(idx);
  }

  bool out_of_budget(const HopSetup& h, HopResult& r) {
    if (r.cycles + r.collision_cycles >= h.budget) {
      r.outage = true;
      return true;
    }
    return false;
  }

  void geraf(const HopSetup& h, HopResult& r) {
    const ScenarioConfig& c = *h.cfg;
    const OperatingPoint& op = *h.op;
    const double Tc = c.T_c, Ts = op.T_s, Tp = c.T_p, PtC = op.P_tC, PtD = op.P_tD, PL = c.P_Rx + c.P_tBT;
    const int N = c.N;
    const int nT = op.protocol == Protocol::GerafMrc ? op.n_T : 1;
    const std::uint64_t snd = h.sender;
    for (;;) {
      if (out_of_budget(h, r)) return;
      draw(h);
      ++r.cycles;
      if (f_.ppa.empty()) {
        ++r.empty_cycles;
        if (!f_.npa.empty()) ++r.npa_cycles;
        m_.charge(snd, "tx_rts", Tc, PtC);
        m_.charge(snd, "listen", Tc + (N - 1) * Ts, PL);
        m_.clock += N * Ts;
        continue;
      }
      const int k = first_slice();
      r.me = k;
      m_.charge(snd, "tx_rts", Tc, PtC);
      m_.charge_each(f_.ppa, f_.base, "rx_rts", Tc, PL);
      m_.charge_each(f_.ppa, f_.base, "listen_cts", k * Ts, PL);
      m_.charge(snd, "tx_continue", k * Ts, 0.5 * PtC);
      m_.charge(snd, "wait_cts", k * Ts, 0.5 * PtC);
      m_.clock += k * Ts;

      // probability-1/2 splitting among the responders of slice k
      std::vector<int> alive = slice_members(k), tx;
      while (alive.size() > 1) {
        tx.clear();
        for (int i : alive)
          if (s_.split.next_u32() & 1u) tx.push_back(i);
        ++r.mn;
        r.cts_tx += static_cast<long>(tx.size());
        m_.charge_each(tx, f_.base, "tx_cts_split", Ts, 0.5 * PtC);
        m_.charge(snd, "detect_collision", Ts, 0.5 * (PtC + PL));
        m_.clock += Ts;
        if (!tx.empty() && tx.size() < alive.size()) alive.swap(tx);
      }
      set_relay(h, r, alive.front());
      const std::uint64_t rel = r.relay;
      m_.charge(rel, "tx_cts", Tc, PtC);
      m_.charge(snd, "rx_cts", Tc, PL);
      m_.charge(snd, "tx_select", Tc, PtC);
      m_.charge(rel, "rx_select", Tc, PL);
      for (int t = 0; t < nT; ++t) {
        m_.charge(snd, "tx_data", Tp, PtD);
        m_.charge(rel, "rx_data", Tp, PL);
        m_.charge(rel, "tx_ack", Tc, PtC);
        m_.charge(snd, "rx_ack", Tc, PL);
        m_.clock += Tp;
      }
      return;
    }
  }

  void opt(const HopSetup& h, HopResult& r) {
    const ScenarioConfig& c = *h.cfg;
    const OperatingPoint& op = *h.op;
    const double Tc = c.T_c, Tp = c.T_p, PtC = op.P_tC, PtD = op.P_tD, PL = c.P_Rx + c.P_tBT;
    const int N = c.N;
    const std::uint64_t snd = h.sender;
    for (;;) {
      if (out_of_budget(h, r)) return;
      draw(h);
      ++r.cycles;
      if (f_.ppa.empty()) {
        ++r.empty_cycles;
        if (!f_.npa.empty()) ++r.npa_cycles;
        m_.charge(snd, "tx_rts", Tc, PtD);
        m_.charge(snd, "listen", N * Tc, PL);
        m_.clock += 2.0 * N * Tc;
        continue;
      }
      const int k = first_slice();
      r.me = k;
      int best = f_.ppa.front();
      for (int i : f_.ppa)
        if (f_.prog[i] > f_.prog[best]) best = i;
      m_.charge(snd, "tx_rts", Tc, PtD);
      m_.charge_each(f_.ppa, f_.base, "rx_rts", Tc, PL);
      m_.charge_each(f_.ppa, f_.base, "listen_cts", k * Tc, PL);
      m_.charge(snd, "listen_cts", k * Tc, PL);
      m_.clock += 2.0 * k * Tc;
      set_relay(h, r, best);
      const std::uint64_t rel = r.relay;
      m_.charge(rel, "tx_cts", Tc, PtC);
      m_.charge(snd, "rx_cts", Tc, PL);
      m_.charge(snd, "tx_select", Tc, PtC);
      m_.charge(rel, "rx_select", Tc, PL);
      m_.charge(snd, "tx_data", Tp, PtD);
      m_.charge(rel, "rx_data", Tp, PL);
      m_.clock += 3.0 * Tc + Tp;
      return;
    }
  }

  void boss(const HopSetup& h, HopResult& r) {
    const ScenarioConfig& c = *h.cfg;
    const OperatingPoint& op = *h.op;
    const double Ts = op.T_s, Tp = c.T_p, PtC = op.P_tC, PtD = op.P_tD, PL = c.P_Rx + c.P_tBT;
    const int x = c.x;
    const double xN = static_cast<double>(x) * c.N;
    const double win = c.boss_empty_window * xN, j = c.boss_npa_cycles;
    const std::uint64_t snd = h.sender;
    for (;;) {
      if (out_of_budget(h, r)) return;
      draw(h);
      ++r.cycles;
      if (f_.ppa.empty()) {
        ++r.empty_cycles;
        if (f_.npa.empty()) {
          m_.charge(snd, "tx_rts_data", Tp, PtD);
          m_.charge(snd, "listen", win * Ts, PL);
          m_.clock += Tp + win * Ts;
          continue;
        }
        // An NPA node takes the packet without progress; the sender keeps
        // its position and tries again.
        ++r.npa_cycles;
        int back = f_.npa.front();
        for (int i : f_.npa)
          if (f_.prog[i] > f_.prog[back]) back = i;
        const std::uint64_t rel = f_.base + static_cast<std::uint64_t>(back);
        m_.charge(snd, "tx_rts_data", Tp, PtD, j);
        m_.charge_each(f_.npa, f_.base, "rx_rts_data", Tp, PL, j);
        m_.charge_each(f_.npa, f_.base, "tx_cts_npa", win * Ts, PtC / win, j);
        m_.charge(snd, "rx_cts", win * Ts, PL, j);
        m_.charge(snd, "tx_select", Ts, PtC, j);
        m_.charge(rel, "rx_select", Ts, PL, j);
        m_.clock += j * (Tp + (win + 1.0) * Ts);
        continue;
      }
      const int k = first_slice();
      r.me = k;
      const std::vector<int> contenders = slice_members(k);
      std::vector<int> disk(f_.xs.size());
      for (std::size_t i = 0; i < disk.size(); ++i) disk[i] = static_cast<int>(i);
      std::vector<std::uint64_t> offs(contenders.size());
      std::vector<int> earliest;
      bool first = true;
      for (;;) {
        std::uint64_t lo = static_cast<std::uint64_t>(x);
        for (std::size_t i = 0; i < contenders.size(); ++i) {
          offs[i] = s_.offsets.below(static_cast<std::uint64_t>(x));
          lo = std::min(lo, offs[i]);
        }
        earliest.clear();
        for (std::size_t i = 0; i < contenders.size(); ++i)
          if (offs[i] == lo) earliest.push_back(contenders[i]);
        const double me = static_cast<double>(k) * x + static_cast<double>(lo);
        m_.charge(snd, "tx_rts_data", Tp, PtD);
        m_.charge_each(disk, f_.base, "rx_rts_data", Tp, PL);
        m_.charge_each(disk, f_.base, "listen_cts", me * Ts, PL);
        m_.charge(snd, "listen_cts", me * Ts, PL);
        if (earliest.size() >= 2) {
          if (first) r.first_collision = true;
          first = false;
          ++r.collision_cycles;
          m_.charge_each(earliest, f_.base, "tx_cts_collide", Ts, PtC);
          m_.charge(snd, "rx_cts_fail", Ts, PL);
          m_.charge_each(earliest, f_.base, "wait_ack", std::max(0.0, xN - me - 1.0) * Ts, PL);
          m_.clock += Tp + c.boss_collision_window * xN * Ts;
          if (out_of_budget(h, r)) return;
          continue;
        }
        r.me_fine = static_cast<long>(me);
        set_relay(h, r, earliest.front());
        const std::uint64_t rel = r.relay;
        m_.charge(rel, "tx_cts", Ts, PtC);
        m_.charge(snd, "rx_cts", Ts, PL);
        m_.charge(snd, "tx_select", Ts, PtC);
        m_.charge(rel, "rx_select", Ts, PL);
        m_.clock += Tp + (me + 2.0) * Ts;
        return;
      }
    }
  }

  Streams& s_;
  Meter& m_;
  const SimOptions& opt_;
  SimTrial* trace_;
  std::uint64_t& next_id_;
  Field f_;
};

OperatingPoint point_for(const ScenarioConfig& cfg, Protocol protocol) {
  cfg.validate();
  LinkBudget link = link_budget_for(cfg);
  return operating_point(protocol, cfg, link);
}

RouteResult run_route(const ScenarioConfig& cfg, const OperatingPoint& op, std::uint64_t seed,
                      std::uint64_t trial, const SimOptions& options) {
  RouteResult out;
  out.trace.seed = seed;
  out.trace.trial = trial;
  SimTrial* trace = options.record_events || options.record_positions ? &out.trace : nullptr;
  SimTrial* events = options.record_events ? &out.trace : nullptr;
  Streams streams(seed, trial);
  Meter meter(events);
  std::uint64_t next_id = kFirstFieldId;
  HopEngine engine(streams, meter, options, trace, next_id);

  const double R = op.range;
  const Point dest{cfg.D, 0.0};
  Point at{0.0, 0.0};
  std::uint64_t sender = kSourceId;
  for (;;) {
    double dx = dest.x - at.x, dy = dest.y - at.y;
    double d = std::hypot(dx, dy);
    HopSetup h;
    h.cfg = &cfg;
    h.op = &op;
    h.sender = sender;
    h.frame = {at, dx / d, dy / d};
    h.budget = cfg.cycle_budget - out.cycles;
    SlicingGeometry local;
    if (d <= R) {
      // The destination answers the last hop after a regular contention.
      h.terminal = true;
      h.geo = &op.geometry;
      h.d = op.geometry.remaining_distance;
    } else {
      local = slice_bounds(R, d, cfg.N, cfg.slicing);
      h.geo = &local;
      h.d = d;
    }
    HopResult r = engine.run(h);
    out.cycles += r.cycles + r.collision_cycles;
    HopTrace ht;
    ht.sender = at;
    ht.cycles = r.cycles;
    ht.slots = op.protocol == Protocol::Boss ? r.me_fine : r.me + r.mn;
    ht.collisions = op.protocol == Protocol::Boss ? r.collision_cycles : r.mn;
    ht.energy = r.energy;
    ht.delay = r.delay;
    if (r.outage) {
      out.outage = true;
      if (trace) out.trace.hop_trace.push_back(ht);
      break;
    }
    ++out.hops;
    Point next = h.terminal ? dest : h.frame.to_world(r.x, r.y);
    ht.relay = next;
    if (trace) out.trace.hop_trace.push_back(ht);
    if (h.terminal) break;
    at = next;
    sender = r.relay;
  }
  out.energy = meter.energy;
  out.delay = meter.clock;
  return out;
}

template <class Fn>
void parallel_for(long n, unsigned threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<long>(threads, std::max<long>(1, n)));
  if (threads <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (long i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Running sums reduced in index order so results are thread-count free.
struct Accumulator {
  double sum = 0.0, sum2 = 0.0;
  long n = 0;
  void add(double v) {
    sum += v;
    sum2 += v * v;
    ++n;
  }
  Estimate estimate() const {
    Estimate e;
    e.samples = n;
    if (n == 0) return e;
    e.mean = sum / n;
    double var = n > 1 ? (sum2 - sum * sum / n) / (n - 1) : 0.0;
    e.stderr_mean = std::sqrt(std::max(0.0, var) / n);
    return e;
  }
};

}  // namespace

RouteResult simulate_route(const ScenarioConfig& cfg, Protocol protocol, std::uint64_t seed, std::uint64_t trial,
                           const SimOptions& options) {
  OperatingPoint op = point_for(cfg, protocol);
  return run_route(cfg, op, seed, trial, options);
}

RouteSummary simulate_routes(const ScenarioConfig& cfg, Protocol protocol, long trials, std::uint64_t seed,
                             unsigned threads) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  OperatingPoint op = point_for(cfg, protocol);
  std::vector<RouteResult> results(static_cast<std::size_t>(trials));
  SimOptions quiet;
  parallel_for(trials, threads, [&](long i) {
    results[static_cast<std::size_t>(i)] = run_route(cfg, op, seed, static_cast<std::uint64_t>(i), quiet);
  });
  RouteSummary s;
  s.protocol = protocol;
  s.trials = trials;
  Accumulator e, l, q;
  for (const auto& r : results) {
    if (r.outage) {
      ++s.outages;
      continue;
    }
    e.add(r.energy);
    l.add(r.delay);
    q.add(static_cast<double>(r.hops));
  }
  s.energy = e.estimate();
  s.delay = l.estimate();
  s.hops = q.estimate();
  return s;
}

EmpiricalStatistics estimate_statistics(const ScenarioConfig& cfg, Protocol protocol, long trials,
                                        std::uint64_t seed, long route_trials, unsigned threads) {
  if (trials < 1000) throw std::invalid_argument("estimate_statistics needs at least 1000 trials");
  OperatingPoint op = point_for(cfg, protocol);
  std::vector<HopResult> hops(static_cast<std::size_t>(trials));
  SimOptions quiet;
  parallel_for(trials, threads, [&](long i) {
    Streams streams(seed, static_cast<std::uint64_t>(i));
    Meter meter(nullptr);
    std::uint64_t next_id = kFirstFieldId;
    HopEngine engine(streams, meter, quiet, nullptr, next_id);
    HopSetup h;
    h.cfg = &cfg;
    h.op = &op;
    h.geo = &op.geometry;
    h.d = op.geometry.remaining_distance;
    h.budget = cfg.cycle_budget;
    hops[static_cast<std::size_t>(i)] = engine.run(h);
  });

  EmpiricalStatistics st;
  st.protocol = protocol;
  st.trials = trials;
  Accumulator eta, me, me_fine, mn, cts, pc, etap, e, l;
  long draws = 0, npa = 0;
  for (const auto& r : hops) {
    draws += r.cycles;
    npa += r.npa_cycles;
    if (r.outage) {
      ++st.outages;
      continue;
    }
    eta.add(static_cast<double>(r.empty_cycles));
    me.add(static_cast<double>(r.me));
    me_fine.add(static_cast<double>(r.me_fine));
    mn.add(static_cast<double>(r.mn));
    cts.add(static_cast<double>(r.cts_tx));
    pc.add(r.first_collision ? 1.0 : 0.0);
    etap.add(static_cast<double>(r.collision_cycles));
    e.add(r.energy);
    l.add(r.delay);
  }
  st.eta = eta.estimate();
  st.me = me.estimate();
  st.me_fine = me_fine.estimate();
  st.mn = mn.estimate();
  st.cts_transmissions = cts.estimate();
  st.p_c = pc.estimate();
  st.eta_prime = etap.estimate();
  st.e_hop = e.estimate();
  st.l_hop = l.estimate();
  if (draws > 0) {
    double p = static_cast<double>(npa) / static_cast<double>(draws);
    st.p_npa = {p, std::sqrt(p * (1.0 - p) / static_cast<double>(draws)), draws};
  }
  st.route_trials = route_trials < 0 ? std::max(1L, trials / 20) : route_trials;
  if (st.route_trials > 0) {
    // distinct seed so route streams never overlap the per-hop trials
    RouteSummary rs = simulate_routes(cfg, protocol, st.route_trials, seed ^ 0x9E3779B97F4A7C15ull, threads);
    st.q = rs.hops;
  }
  return st;
}

std::string event_log_csv(const std::vector<SimEvent>& events) {
  std::ostringstream os;
  os << "time_s,node_id,activity_label,power_w,energy_j\n";
  for (const auto& e : events)
    os << format_number(e.time) << ',' << e.node << ',' << e.label << ',' << format_number(e.power) << ','
       << format_number(e.energy) << '\n';
  return os.str();
}

}  // namespace georoute
