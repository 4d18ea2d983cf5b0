#pragma once

#include <optional>
#include <string>
#include <vector>

#include "georoute/config.hpp"
#include "georoute/geometry.hpp"
#include "georoute/hopstats.hpp"
#include "georoute/linkmodel.hpp"

namespace georoute {

struct ActivityRow {
  int id = 0;
  std::string label;    // duration expression as in the table, e.g. "m_e*T_s"
  double duration = 0.0;
  std::string nodes;
  double count = 0.0;
  std::string task;
  std::string power_label;
  double power = 0.0;
  double repeat = 1.0;

  double energy() const { return repeat * duration * count * power; }
};

struct ProtocolLedger {
  Protocol protocol = Protocol::GerafPc;
  std::vector<ActivityRow> rows;
  double e_hop = 0.0;
  double l_hop = 0.0;
};

// Everything a protocol needs to be evaluated at one configuration: which
// range it works over, at which powers, and the per-hop contention laws.
struct OperatingPoint {
  Protocol protocol = Protocol::GerafPc;
  double range = 0.0;
  double P_tC = 0.0;
  double P_tD = 0.0;
  int n_T = 1;
  double T_s = 0.0;
  SlicingGeometry geometry;
  HopStatistics stats;
  AdvanceRule advance = AdvanceRule::FirstSliceUniform;
};

LinkBudget link_budget_for(const ScenarioConfig& cfg);
OperatingPoint operating_point(Protocol p, const ScenarioConfig& cfg, const LinkBudget& link);
// Geometry used for per-hop expectations: far field unless the route is
// shorter than far_field_ratio ranges.
SlicingGeometry representative_geometry(double range, const ScenarioConfig& cfg);

ProtocolLedger build_geraf_ledger(Protocol variant, const OperatingPoint& op, const ScenarioConfig& cfg);
ProtocolLedger build_boss_ledger(const OperatingPoint& op, const ScenarioConfig& cfg);
ProtocolLedger build_opt_ledger(const OperatingPoint& op, const ScenarioConfig& cfg);
ProtocolLedger build_ledger(const OperatingPoint& op, const ScenarioConfig& cfg);

// Closed-form delays from the contention expectations alone.
double geraf_delay(double eta, double me, double mn, int N, double T_s, int n_T, double T_p);
double boss_delay(double eta, double p_npa, double p_ppa, double eta_prime, double me, int x, int N,
                  double T_s, double T_p, double empty_window = 2.0, double collision_window = 1.0);
double opt_delay(double eta, double me, int N, double T_c, double T_p);

struct EndToEndResult {
  Protocol protocol = Protocol::GerafPc;
  double e_hop = 0.0;
  double l_hop = 0.0;
  double hops = 1.0;
  double hops_stderr = 0.0;
  double e_e2e = 0.0;
  double l_e2e = 0.0;
  double composite = 1.0;
  double energy_per_bit = 0.0;
  double delay_per_bit = 0.0;
  bool infeasible = false;
  std::string reason;
};

EndToEndResult end_to_end(const ProtocolLedger& ledger, double q,
                          const std::optional<EndToEndResult>& opt_baseline, double phi,
                          long payload_bits);

std::string serialize_ledger(const ProtocolLedger& ledger);

}  // namespace georoute
