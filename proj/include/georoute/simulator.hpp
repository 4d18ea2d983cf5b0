#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "georoute/config.hpp"
#include "georoute/protocols.hpp"

namespace georoute {

struct SimEvent {
  double time = 0.0;
  std::uint64_t node = 0;
  std::string label;
  double power = 0.0;
  double energy = 0.0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct HopTrace {
  Point sender;
  Point relay;
  long cycles = 0;      // field draws, the successful one included
  long slots = 0;       // empty plus resolution slots (granules for BOSS)
  long collisions = 0;  // GeRaF splitting slots or BOSS collision cycles
  double energy = 0.0;
  double delay = 0.0;
};

struct SimTrial {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  // awake nodes of every drawn field, only when requested
  std::vector<Point> node_positions;
  std::vector<SimEvent> event_log;
  std::vector<HopTrace> hop_trace;
};

// Replaces the random awake field of a cycle. Coordinates are relative to
// the sender with the destination on the positive x axis at distance d
// (infinite for the far field). Used for degenerate, hand-built fields.
using FieldHook = std::function<void(double R, double d, std::vector<double>& xs, std::vector<double>& ys)>;

struct SimOptions {
  bool record_events = false;
  bool record_positions = false;
  FieldHook field;
};

struct RouteResult {
  double energy = 0.0;
  double delay = 0.0;
  long hops = 0;
  long cycles = 0;
  bool outage = false;
  SimTrial trace;
};

// One source-to-destination route over fresh per-cycle awake fields. Trial
// selects the random streams, so (seed, trial) pairs are independent.
RouteResult simulate_route(const ScenarioConfig& cfg, Protocol protocol, std::uint64_t seed,
                           std::uint64_t trial = 0, const SimOptions& options = {});

struct Estimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
  long samples = 0;
};

struct RouteSummary {
  Protocol protocol = Protocol::GerafPc;
  long trials = 0;
  long outages = 0;
  Estimate energy;
  Estimate delay;
  Estimate hops;
};

// Outage routes are counted, not averaged. threads = 0 uses every core;
// results do not depend on it.
RouteSummary simulate_routes(const ScenarioConfig& cfg, Protocol protocol, long trials, std::uint64_t seed,
                             unsigned threads = 0);

struct EmpiricalStatistics {
  Protocol protocol = Protocol::GerafPc;
  long trials = 0;
  long outages = 0;
  Estimate eta;
  Estimate me;         // slots; granules for BOSS are reported in me_fine
  Estimate me_fine;
  Estimate mn;
  Estimate cts_transmissions;
  Estimate p_npa;      // per field draw
  Estimate p_c;        // first response round collides
  Estimate eta_prime;  // collision cycles per hop
  Estimate e_hop;
  Estimate l_hop;
  Estimate q;
  long route_trials = 0;
};

// Per-hop trials in the same geometry the ledgers use, plus route_trials
// full routes for q (negative picks trials / 20).
EmpiricalStatistics estimate_statistics(const ScenarioConfig& cfg, Protocol protocol, long trials,
                                        std::uint64_t seed, long route_trials = -1, unsigned threads = 0);

std::string event_log_csv(const std::vector<SimEvent>& events);

}  // namespace georoute
