#include "georoute/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace georoute {

std::vector<std::string> preset_names() { return {"default", "vanet", "rescue", "sun", "environmental"}; }

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig c;
  c.name = std::string(name);
  if (name == "default") return c;
  if (name == "vanet") {
    // vehicles: no sleeping, delay first, frequency-selective fast fading
    c.epsilon = 1.0;
    c.phi = 0.2;
    c.P_tmax = dbm_to_watts(20.0);
    c.channel.multipath_count = 3;
    c.channel.mean_tap_gains = {1.0, 1.0, 1.0};
    c.channel.coherence_time = 0.4e-3;
    c.rho = 0.05;
    c.T_p = 2e-3;
    c.N = 4;
    c.x = 32;
    return c;
  }
  if (name == "rescue") {
    c.epsilon = 1.0;
    c.phi = 0.6;
    c.T_p = 10e-3;
    c.rho = 0.1;
    return c;
  }
  if (name == "sun") {
    c.epsilon = 0.02;
    c.phi = 0.9;
    return c;
  }
  if (name == "environmental") {
    c.epsilon = 0.1;
    c.phi = 0.5;
    return c;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

const EndToEndResult* Evaluation::find(Protocol p) const {
  for (const auto& r : results)
    if (r.protocol == p) return &r;
  return nullptr;
}

Evaluation evaluate(const ScenarioConfig& cfg, const std::vector<Protocol>& protocols) {
  cfg.validate();
  Evaluation ev;
  ev.cfg = cfg;
  std::vector<Protocol> order = protocols;
  if (std::find(order.begin(), order.end(), Protocol::RtsCtsDataOpt) == order.end())
    order.push_back(Protocol::RtsCtsDataOpt);

  auto mark_all = [&](const std::string& why) {
    ev.infeasible = true;
    ev.reason = why;
    ev.results.clear();
    for (Protocol p : order) {
      EndToEndResult r;
      r.protocol = p;
      r.infeasible = true;
      r.reason = why;
      ev.results.push_back(r);
    }
  };

  try {
    ev.link = link_budget_for(cfg);
  } catch (const InfeasibleError& e) {
    mark_all(e.what());
    return ev;
  }

  const long bits = cfg.payload_bits();
  std::map<std::pair<double, int>, HopCountEstimate> hop_cache;
  auto hops_for = [&](const OperatingPoint& op) {
    auto key = std::make_pair(op.range, static_cast<int>(op.advance));
    auto it = hop_cache.find(key);
    if (it != hop_cache.end()) return it->second;
    auto est = expected_hop_count(cfg.D, op.range, cfg.rho, cfg.epsilon, cfg.N, cfg.slicing, op.advance,
                                  cfg.hop_routes, cfg.hop_seed);
    hop_cache.emplace(key, est);
    return est;
  };

  struct Partial {
    Protocol p;
    ProtocolLedger ledger;
    HopCountEstimate hops;
  };
  std::vector<Partial> parts;
  try {
    for (Protocol p : order) {
      OperatingPoint op = operating_point(p, cfg, ev.link);
      parts.push_back({p, build_ledger(op, cfg), hops_for(op)});
    }
  } catch (const InfeasibleError& e) {
    mark_all(e.what());
    return ev;
  }

  std::optional<EndToEndResult> base;
  for (const auto& part : parts)
    if (part.p == Protocol::RtsCtsDataOpt) base = end_to_end(part.ledger, part.hops.mean, std::nullopt, cfg.phi, bits);
  for (const auto& part : parts) {
    EndToEndResult r = part.p == Protocol::RtsCtsDataOpt ? *base : end_to_end(part.ledger, part.hops.mean, base, cfg.phi, bits);
    r.hops_stderr = part.hops.stderr_mean;
    ev.results.push_back(r);
  }
  return ev;
}

SweepResult run_sweep(const SweepSpec& spec, const ScenarioConfig& base, unsigned threads) {
  if (spec.values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (!is_config_key(spec.parameter))
    throw std::invalid_argument("unknown sweep parameter '" + spec.parameter + "'");
  if (spec.protocols.empty()) throw std::invalid_argument("sweep needs at least one protocol");
  // Validate every point up front so usage errors surface before any work.
  std::vector<ScenarioConfig> points;
  for (const auto& v : spec.values) {
    ScenarioConfig c = base;
    set_config_value(c, spec.parameter, v);
    c.validate();
    points.push_back(c);
  }
  std::vector<Evaluation> evals(points.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(points.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < points.size(); i = next++) evals[i] = evaluate(points[i], spec.protocols);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  SweepResult out;
  out.spec = spec;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (const auto& r : evals[i].results) out.rows.push_back({spec.values[i], r});
  return out;
}

std::string sweep_csv_header() {
  return "param,protocol,E_hop_J,l_hop_s,q,E_e2e_J,l_e2e_s,E_per_bit,l_per_bit,C_e2e,infeasible";
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << sweep_csv_header() << '\n';
  for (const auto& row : r.rows) {
    const auto& e = row.result;
    os << row.value << ',' << protocol_name(e.protocol) << ',';
    if (e.infeasible) {
      os << ",,,,,,,,1\n";
      continue;
    }
    os << format_number(e.e_hop) << ',' << format_number(e.l_hop) << ',' << format_number(e.hops) << ','
       << format_number(e.e_e2e) << ',' << format_number(e.l_e2e) << ',' << format_number(e.energy_per_bit) << ','
       << format_number(e.delay_per_bit) << ',' << format_number(e.composite) << ",0\n";
  }
  return os.str();
}

Metric parse_metric(std::string_view s) {
  if (s == "delay") return Metric::Delay;
  if (s == "energy") return Metric::Energy;
  if (s == "composite") return Metric::Composite;
  throw std::invalid_argument("unknown metric '" + std::string(s) + "' (delay, energy, composite)");
}

double metric_value(const EndToEndResult& r, Metric m) {
  switch (m) {
    case Metric::Delay: return r.l_e2e;
    case Metric::Energy: return r.e_e2e;
    case Metric::Composite: return r.composite;
  }
  return r.composite;
}

OptimizationResult optimize_subareas(const ScenarioConfig& base, Protocol protocol, const std::vector<int>& N_range,
                                     Metric metric) {
  if (N_range.empty()) throw std::invalid_argument("N range must not be empty");
  OptimizationResult out;
  bool have = false;
  std::vector<int> ns = N_range;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  for (int n : ns) {
    ScenarioConfig c = base;
    c.N = n;
    Evaluation ev = evaluate(c, {protocol});
    const EndToEndResult* r = ev.find(protocol);
    if (!r || r->infeasible) throw InfeasibleError("infeasible at N=" + std::to_string(n) + ": " + ev.reason);
    double v = metric_value(*r, metric);
    out.curve.emplace_back(n, v);
    // strict comparison keeps the smaller N on ties
    if (!have || v < out.best_value) {
      out.best_value = v;
      out.best_N = n;
      have = true;
    }
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (points < 1 || !(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("bad log grid");
  std::vector<double> v;
  if (points == 1) return {lo};
  double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < points; ++i) v.push_back(std::pow(10.0, a + (b - a) * i / (points - 1)));
  return v;
}

}  // namespace georoute
