#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "georoute/geometry.hpp"
#include "georoute/linkmodel.hpp"

namespace georoute {

enum class Protocol { GerafPc, GerafMrc, Boss, RtsCtsDataOpt };

inline constexpr Protocol kAllProtocols[] = {Protocol::GerafPc, Protocol::GerafMrc, Protocol::Boss,
                                             Protocol::RtsCtsDataOpt};

std::string_view protocol_name(Protocol p);
Protocol parse_protocol(std::string_view s);
// Comma-separated list; "all" expands to every protocol.
std::vector<Protocol> parse_protocol_list(std::string_view s);

// How ledger rows whose node counts depend on the slot outcome are reduced
// to a single number.
enum class Averaging {
  PlugIn,  // evaluate at the expected outcome
  Exact,   // expectation over the outcome distribution
};

// Which link the idealized three-way handshake is granted.
enum class OptLink {
  ControlRange,  // full power, control-packet range (equal-range idealization)
  DataRange,     // full power data, power-controlled control packets
};

struct ScenarioConfig {
  std::string name = "default";

  // deployment
  double D = 100.0;
  double rho = 0.5;
  double epsilon = 0.1;

  // protocol
  int N = 4;
  int x = 32;

  // timing
  double T_p = 4e-3;
  double T_c = 0.352e-3;

  // powers
  double P_tmax = 1e-3;
  double P_n = 1e-13;
  double P_Rx = 0.5e-3;
  double P_tBT = 0.5e-3;

  // propagation and PHY
  double wavelength = 0.125;
  double alpha = 3.0;
  McsProfile mcs{};
  McsProfile control_mcs{};
  double per_target = 0.1;
  FadingChannelModel channel{};

  double phi = 0.5;

  // model knobs
  SlicingStrategy slicing = SlicingStrategy::EqualProgress;
  Averaging averaging = Averaging::Exact;
  OptLink opt_link = OptLink::ControlRange;
  double far_field_ratio = 10.0;
  double mn_override = -1.0;
  double boss_npa_cycles = 1.0;     // j
  double boss_empty_window = 2.0;   // window of an empty/NPA cycle, in units of xN slots
  double boss_collision_window = 1.0;  // window of a collision cycle, in units of xN slots
  long hop_routes = 10000;
  std::uint64_t hop_seed = 1;
  long cycle_budget = 1000000;

  double symbol_rate() const { return 1.0 / channel.symbol_duration; }
  long payload_bits() const;
  long control_bits() const;
  void validate() const;
};

// Flat key=value access to every field, used by scenario files, --set and
// sweeps. Unknown keys throw std::invalid_argument naming the key.
void set_config_value(ScenarioConfig& cfg, std::string_view key, std::string_view value);
std::string get_config_value(const ScenarioConfig& cfg, std::string_view key);
std::vector<std::string> config_keys();
bool is_config_key(std::string_view key);

// '#' starts a comment; blank lines are ignored.
ScenarioConfig parse_config_text(std::string_view text, ScenarioConfig base = {});
ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base = {});
std::string format_config(const ScenarioConfig& cfg);

std::string format_number(double v);

}  // namespace georoute
