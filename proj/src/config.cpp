#include "georoute/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace georoute {

std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::GerafPc: return "geraf-pc";
    case Protocol::GerafMrc: return "geraf-mrc";
    case Protocol::Boss: return "boss";
    case Protocol::RtsCtsDataOpt: return "opt";
  }
  return "?";
}

Protocol parse_protocol(std::string_view s) {
  std::string t;
  for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  std::replace(t.begin(), t.end(), '_', '-');
  if (t == "geraf-pc" || t == "pc") return Protocol::GerafPc;
  if (t == "geraf-mrc" || t == "mrc") return Protocol::GerafMrc;
  if (t == "boss") return Protocol::Boss;
  if (t == "opt" || t == "rts-cts-data-opt" || t == "rts/cts/data-opt") return Protocol::RtsCtsDataOpt;
  throw std::invalid_argument("unknown protocol '" + std::string(s) + "'");
}

std::vector<Protocol> parse_protocol_list(std::string_view s) {
  std::vector<Protocol> out;
  if (s == "all") return {std::begin(kAllProtocols), std::end(kAllProtocols)};
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(',', start);
    if (end == std::string_view::npos) end = s.size();
    auto item = s.substr(start, end - start);
    if (!item.empty()) {
      Protocol p = parse_protocol(item);
      if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    start = end + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty protocol list");
  return out;
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

long ScenarioConfig::payload_bits() const {
  // T_p / T_sym can land a hair under an integer in floating point
  double symbols = std::floor(T_p / channel.symbol_duration * (1.0 + 1e-12));
  return static_cast<long>(std::floor(symbols * mcs.info_bits_per_symbol() + 1e-9));
}

long ScenarioConfig::control_bits() const {
  double symbols = std::floor(T_c / channel.symbol_duration * (1.0 + 1e-12));
  return static_cast<long>(std::floor(symbols * control_mcs.info_bits_per_symbol() + 1e-9));
}

void ScenarioConfig::validate() const {
  auto need = [](bool ok, const char* key, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(key) + ": " + what);
  };
  need(D > 0.0 && std::isfinite(D), "D", "must be positive");
  need(rho > 0.0 && std::isfinite(rho), "rho", "must be positive");
  need(epsilon > 0.0 && epsilon <= 1.0, "epsilon", "must lie in (0, 1]");
  need(N >= 1, "N", "must be at least 1");
  need(x >= 2, "x", "must be at least 2");
  need(T_p > 0.0, "T_p", "must be positive");
  need(T_c > 0.0, "T_c", "must be positive");
  need(T_c <= T_p, "T_c", "must not exceed T_p");
  need(P_tmax > 0.0, "P_tmax", "must be positive");
  need(P_n > 0.0, "P_n", "must be positive");
  need(P_Rx >= 0.0, "P_Rx", "must be non-negative");
  need(P_tBT >= 0.0, "P_tBT", "must be non-negative");
  need(wavelength > 0.0, "wavelength", "must be positive");
  need(alpha >= 2.0, "alpha", "must be at least 2");
  need(phi >= 0.0 && phi <= 1.0, "phi", "must lie in [0, 1]");
  need(per_target > 0.0 && per_target < 1.0, "per_target", "must lie in (0, 1)");
  need(far_field_ratio >= 1.0, "far_field_ratio", "must be at least 1");
  need(boss_npa_cycles >= 0.0, "boss_npa_cycles", "must be non-negative");
  need(boss_empty_window > 0.0, "boss_empty_window", "must be positive");
  need(boss_collision_window > 0.0, "boss_collision_window", "must be positive");
  need(hop_routes >= 1, "hop_routes", "must be at least 1");
  need(cycle_budget >= 1, "cycle_budget", "must be at least 1");
  channel.validate();
  need(control_bits() >= 1, "T_c", "shorter than one control symbol");
  need(payload_bits() >= 1, "T_p", "shorter than one data symbol");
}

namespace {

double parse_double(std::string_view key, std::string_view v) {
  std::string s(v);
  std::size_t pos = 0;
  double out;
  try {
    out = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(key) + ": expected a number, got '" + s + "'");
  }
  if (pos != s.size()) throw std::invalid_argument(std::string(key) + ": expected a number, got '" + s + "'");
  return out;
}

long parse_long(std::string_view key, std::string_view v) {
  long out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw std::invalid_argument(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw std::invalid_argument(std::string(key) + ": expected an unsigned integer, got '" + std::string(v) + "'");
  return out;
}

struct Field {
  std::string key;
  std::function<void(ScenarioConfig&, std::string_view)> set;
  std::function<std::string(const ScenarioConfig&)> get;
  bool serialized = true;  // aliases and derived values are skipped when writing files
};

#define GR_DOUBLE(name)                                                                     \
  Field{#name, [](ScenarioConfig& c, std::string_view v) { c.name = parse_double(#name, v); }, \
        [](const ScenarioConfig& c) { return format_number(c.name); }}
#define GR_INT(name)                                                                                  \
  Field{#name, [](ScenarioConfig& c, std::string_view v) { c.name = static_cast<int>(parse_long(#name, v)); }, \
        [](const ScenarioConfig& c) { return std::to_string(c.name); }}
#define GR_LONG(name)                                                                     \
  Field{#name, [](ScenarioConfig& c, std::string_view v) { c.name = parse_long(#name, v); }, \
        [](const ScenarioConfig& c) { return std::to_string(c.name); }}

std::string join_gains(const std::vector<double>& g) {
  std::string s;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) s += ',';
    s += format_number(g[i]);
  }
  return s;
}

const std::vector<Field>& registry() {
  static const std::vector<Field> fields = {
      Field{"name", [](ScenarioConfig& c, std::string_view v) { c.name = std::string(v); },
            [](const ScenarioConfig& c) { return c.name; }},
      GR_DOUBLE(D),
      GR_DOUBLE(rho),
      GR_DOUBLE(epsilon),
      GR_INT(N),
      GR_INT(x),
      GR_DOUBLE(T_p),
      GR_DOUBLE(T_c),
      GR_DOUBLE(P_tmax),
      Field{"P_tmax_dBm", [](ScenarioConfig& c, std::string_view v) { c.P_tmax = dbm_to_watts(parse_double("P_tmax_dBm", v)); },
            [](const ScenarioConfig& c) { return format_number(watts_to_dbm(c.P_tmax)); }, false},
      GR_DOUBLE(P_n),
      Field{"P_n_dBm", [](ScenarioConfig& c, std::string_view v) { c.P_n = dbm_to_watts(parse_double("P_n_dBm", v)); },
            [](const ScenarioConfig& c) { return format_number(watts_to_dbm(c.P_n)); }, false},
      GR_DOUBLE(P_Rx),
      GR_DOUBLE(P_tBT),
      GR_DOUBLE(wavelength),
      GR_DOUBLE(alpha),
      GR_DOUBLE(phi),
      Field{"mcs", [](ScenarioConfig& c, std::string_view v) { c.mcs = McsProfile::parse(v); },
            [](const ScenarioConfig& c) { return c.mcs.name(); }},
      Field{"control_mcs", [](ScenarioConfig& c, std::string_view v) { c.control_mcs = McsProfile::parse(v); },
            [](const ScenarioConfig& c) { return c.control_mcs.name(); }},
      GR_DOUBLE(per_target),
      Field{"multipath_count",
            [](ScenarioConfig& c, std::string_view v) {
              long m = parse_long("multipath_count", v);
              if (m < 1) throw std::invalid_argument("multipath_count: must be at least 1");
              c.channel.multipath_count = static_cast<int>(m);
              if (static_cast<long>(c.channel.mean_tap_gains.size()) != m)
                c.channel.mean_tap_gains.assign(static_cast<std::size_t>(m), 1.0);
            },
            [](const ScenarioConfig& c) { return std::to_string(c.channel.multipath_count); }},
      Field{"tap_gains",
            [](ScenarioConfig& c, std::string_view v) {
              std::vector<double> g;
              std::size_t start = 0;
              while (start <= v.size()) {
                auto end = v.find(',', start);
                if (end == std::string_view::npos) end = v.size();
                g.push_back(parse_double("tap_gains", v.substr(start, end - start)));
                start = end + 1;
              }
              c.channel.mean_tap_gains = g;
              c.channel.multipath_count = static_cast<int>(g.size());
            },
            [](const ScenarioConfig& c) { return join_gains(c.channel.mean_tap_gains); }},
      Field{"coherence_time", [](ScenarioConfig& c, std::string_view v) { c.channel.coherence_time = parse_double("coherence_time", v); },
            [](const ScenarioConfig& c) { return format_number(c.channel.coherence_time); }},
      Field{"symbol_duration", [](ScenarioConfig& c, std::string_view v) { c.channel.symbol_duration = parse_double("symbol_duration", v); },
            [](const ScenarioConfig& c) { return format_number(c.channel.symbol_duration); }},
      Field{"slicing", [](ScenarioConfig& c, std::string_view v) { c.slicing = parse_slicing(v); },
            [](const ScenarioConfig& c) { return std::string(slicing_name(c.slicing)); }},
      Field{"averaging",
            [](ScenarioConfig& c, std::string_view v) {
              if (v == "plugin" || v == "plug-in") c.averaging = Averaging::PlugIn;
              else if (v == "exact") c.averaging = Averaging::Exact;
              else throw std::invalid_argument("averaging: expected plugin or exact, got '" + std::string(v) + "'");
            },
            [](const ScenarioConfig& c) { return std::string(c.averaging == Averaging::Exact ? "exact" : "plugin"); }},
      Field{"opt_link",
            [](ScenarioConfig& c, std::string_view v) {
              if (v == "control") c.opt_link = OptLink::ControlRange;
              else if (v == "data") c.opt_link = OptLink::DataRange;
              else throw std::invalid_argument("opt_link: expected control or data, got '" + std::string(v) + "'");
            },
            [](const ScenarioConfig& c) { return std::string(c.opt_link == OptLink::ControlRange ? "control" : "data"); }},
      GR_DOUBLE(far_field_ratio),
      GR_DOUBLE(mn_override),
      GR_DOUBLE(boss_npa_cycles),
      GR_DOUBLE(boss_empty_window),
      GR_DOUBLE(boss_collision_window),
      GR_LONG(hop_routes),
      Field{"hop_seed", [](ScenarioConfig& c, std::string_view v) { c.hop_seed = parse_u64("hop_seed", v); },
            [](const ScenarioConfig& c) { return std::to_string(c.hop_seed); }},
      GR_LONG(cycle_budget),
      Field{"payload_bits",
            [](ScenarioConfig&, std::string_view) {
              throw std::invalid_argument("payload_bits: derived from T_p, symbol_duration and mcs; set those instead");
            },
            [](const ScenarioConfig& c) { return std::to_string(c.payload_bits()); }, false},
      Field{"control_bits",
            [](ScenarioConfig&, std::string_view) {
              throw std::invalid_argument("control_bits: derived from T_c, symbol_duration and control_mcs");
            },
            [](const ScenarioConfig& c) { return std::to_string(c.control_bits()); }, false},
  };
  return fields;
}

#undef GR_DOUBLE
#undef GR_INT
#undef GR_LONG

const Field& find_field(std::string_view key) {
  for (const auto& f : registry())
    if (f.key == key) return f;
  throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

void set_config_value(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  find_field(trim(key)).set(cfg, trim(value));
}

std::string get_config_value(const ScenarioConfig& cfg, std::string_view key) {
  return find_field(trim(key)).get(cfg);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : registry()) keys.push_back(f.key);
  return keys;
}

bool is_config_key(std::string_view key) {
  for (const auto& f : registry())
    if (f.key == key) return true;
  return false;
}

ScenarioConfig parse_config_text(std::string_view text, ScenarioConfig base) {
  std::size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key=value");
    set_config_value(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

std::string format_config(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& f : registry()) {
    if (!f.serialized) continue;
    out += f.key + "=" + f.get(cfg) + "\n";
  }
  return out;
}

}  // namespace georoute
