#include "georoute/protocols.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace georoute {

LinkBudget link_budget_for(const ScenarioConfig& cfg) {
  return link_budget(cfg.control_bits(), cfg.payload_bits(), cfg.per_target, cfg.channel, cfg.control_mcs,
                     cfg.mcs, cfg.P_tmax, cfg.P_n, cfg.wavelength, cfg.alpha);
}

SlicingGeometry representative_geometry(double range, const ScenarioConfig& cfg) {
  if (cfg.D > range && cfg.D / range <= cfg.far_field_ratio)
    return slice_subareas(range, cfg.D, cfg.N, cfg.slicing);
  return slice_far_field(range, cfg.N, cfg.slicing);
}

OperatingPoint operating_point(Protocol p, const ScenarioConfig& cfg, const LinkBudget& link) {
  OperatingPoint op;
  op.protocol = p;
  op.P_tD = cfg.P_tmax;
  const double reduced = power_control_for_control_packet(cfg.P_tmax, link.gamma_tC, link.gamma_tD);
  switch (p) {
    case Protocol::GerafPc:
      op.range = link.range_data;
      op.P_tC = reduced;
      op.T_s = 2.0 * cfg.T_c;
      break;
    case Protocol::GerafMrc:
      op.range = link.range_control;
      op.P_tC = cfg.P_tmax;
      op.n_T = link.n_T;
      op.T_s = 2.0 * cfg.T_c;
      break;
    case Protocol::Boss:
      // only nodes that decoded the payload-carrying RTS contend
      op.range = link.range_data;
      op.P_tC = reduced;
      op.T_s = cfg.T_c / cfg.x;
      break;
    case Protocol::RtsCtsDataOpt:
      if (cfg.opt_link == OptLink::ControlRange) {
        op.range = link.range_control;
        op.P_tC = cfg.P_tmax;
      } else {
        op.range = link.range_data;
        op.P_tC = reduced;
      }
      op.T_s = cfg.T_c;
      op.advance = AdvanceRule::MaxProgress;
      break;
  }
  op.geometry = representative_geometry(op.range, cfg);
  double M = cfg.epsilon * cfg.rho * op.geometry.ppa_area;
  if (!(M > 0.0)) throw InfeasibleError("no awake relay can ever be reached");
  op.stats = hop_statistics(op.geometry, cfg.rho, cfg.epsilon, cfg.x, cfg.mn_override);
  return op;
}

double geraf_delay(double eta, double me, double mn, int N, double T_s, int n_T, double T_p) {
  return (eta * N + me + mn) * T_s + n_T * T_p;
}

double boss_delay(double eta, double p_npa, double p_ppa, double eta_prime, double me, int x, int N,
                  double T_s, double T_p, double empty_window, double collision_window) {
  double xN = static_cast<double>(x) * N;
  return eta * (T_p + empty_window * xN * T_s) + p_npa * (T_p + (empty_window * xN + 1.0) * T_s) +
         p_ppa * (eta_prime * (T_p + collision_window * xN * T_s) + T_p + (me + 2.0) * T_s);
}

double opt_delay(double eta, double me, int N, double T_c, double T_p) {
  return (2.0 * N * eta + 2.0 * me + 3.0) * T_c + T_p;
}

namespace {

double ztp_mean(double lambda) { return lambda > 0.0 ? lambda / -std::expm1(-lambda) : 1.0; }

// Awake PPA nodes left after skipping the first m subareas, m possibly
// fractional (linear interpolation inside a subarea).
double listeners_after(const SlicingGeometry& g, double m, double density) {
  double skipped = 0.0;
  int whole = static_cast<int>(std::floor(m));
  for (int i = 0; i < whole && i < g.subarea_count; ++i) skipped += g.subareas[i];
  if (whole < g.subarea_count) skipped += (m - whole) * g.subareas[whole];
  return std::max(0.0, g.ppa_area - skipped) * density;
}

// Expectations over the first non-empty subarea k and its contender count n.
struct GerafMoments {
  double listeners = 0.0;     // E[awake PPA nodes]
  double me_listeners = 0.0;  // E[m_e * awake PPA nodes]
};

GerafMoments geraf_moments(const SlicingGeometry& g, const ScenarioConfig& cfg) {
  GerafMoments m;
  auto prof = contention_profile(g, cfg.rho, cfg.epsilon);
  for (int k = 0; k < g.subarea_count; ++k) {
    const auto& s = prof.slices[k];
    double nodes = ztp_mean(s.contenders_mean) + s.beyond_mean;
    m.listeners += s.probability * nodes;
    m.me_listeners += s.probability * k * nodes;
  }
  return m;
}

struct BossMoments {
  double cc = 0.0;             // E[collision cycles]
  double cc_disk = 0.0;        // E[sum over collision cycles of awake disk nodes]
  double cc_me = 0.0;          // ... of empty granules before the collision
  double cc_me_disk1 = 0.0;    // ... of empty granules times (disk nodes + sender)
  double cc_colliders = 0.0;   // ... of colliding relays
  double cc_collider_wait = 0.0;  // ... of colliders times their remaining window
  double s_disk = 0.0;         // successful round: E[awake disk nodes]
  double s_me = 0.0;           // E[empty granules]
  double s_me_disk1 = 0.0;     // E[empty granules times (disk nodes + sender)]
};

BossMoments boss_moments(const SlicingGeometry& g, const ScenarioConfig& cfg) {
  BossMoments b;
  auto prof = contention_profile(g, cfg.rho, cfg.epsilon);
  const int x = cfg.x;
  const double window = static_cast<double>(x) * g.subarea_count;
  for (int k = 0; k < g.subarea_count; ++k) {
    const auto& s = prof.slices[k];
    if (s.probability == 0.0) continue;
    auto pmf = zero_truncated_poisson(s.contenders_mean);
    for (std::size_t n = 1; n < pmf.size(); ++n) {
      double w = s.probability * pmf[n];
      if (w < 1e-300) continue;
      auto r = boss_round_moments(static_cast<int>(n), x);
      double others = s.beyond_mean + prof.npa_mean;  // independent of n
      double disk = static_cast<double>(n) + others;
      double succ_me = k * x + r.offset_given_success;
      b.s_disk += w * disk;
      b.s_me += w * succ_me;
      b.s_me_disk1 += w * succ_me * (disk + 1.0);
      if (r.p_collision > 0.0 && r.p_collision < 1.0) {
        double cycles = r.p_collision / (1.0 - r.p_collision);
        double col_me = k * x + r.offset_given_collision;
        b.cc += w * cycles;
        b.cc_disk += w * cycles * disk;
        b.cc_me += w * cycles * col_me;
        b.cc_me_disk1 += w * cycles * col_me * (disk + 1.0);
        b.cc_colliders += w * cycles * r.colliders_given_collision;
        b.cc_collider_wait += w * cycles *
                              (r.colliders_given_collision * (window - k * x - 1.0) -
                               r.colliders_offset_given_collision);
      }
    }
  }
  return b;
}

ActivityRow row(int id, std::string label, double duration, std::string nodes, double count, std::string task,
                std::string power_label, double power, double repeat) {
  ActivityRow r;
  r.id = id;
  r.label = std::move(label);
  r.duration = duration;
  r.nodes = std::move(nodes);
  r.count = count;
  r.task = std::move(task);
  r.power_label = std::move(power_label);
  r.power = power;
  r.repeat = repeat;
  return r;
}

double safe_ratio(double num, double den, double fallback) { return den > 0.0 ? num / den : fallback; }

void finish(ProtocolLedger& l) {
  l.e_hop = 0.0;
  for (const auto& r : l.rows) l.e_hop += r.energy();
}

}  // namespace

ProtocolLedger build_geraf_ledger(Protocol variant, const OperatingPoint& op, const ScenarioConfig& cfg) {
  if (variant != Protocol::GerafPc && variant != Protocol::GerafMrc)
    throw std::invalid_argument("GeRaF ledger needs the PC or MRC variant");
  const auto& h = op.stats;
  const auto& g = op.geometry;
  const double Tc = cfg.T_c, Ts = op.T_s, Tp = cfg.T_p;
  const double PtC = op.P_tC, PtD = op.P_tD, PL = cfg.P_Rx + cfg.P_tBT;
  const int N = cfg.N;
  const int nT = variant == Protocol::GerafMrc ? op.n_T : 1;
  const double density = cfg.epsilon * cfg.rho;

  double listeners, me_listeners_count;
  if (cfg.averaging == Averaging::Exact) {
    auto m = geraf_moments(g, cfg);
    listeners = m.listeners;
    me_listeners_count = safe_ratio(m.me_listeners, h.mean_me, listeners);
  } else {
    listeners = listeners_after(g, h.mean_me, density);
    me_listeners_count = listeners;
  }
  // every resolution slot carries the responders still in play
  double per_slot_tx = safe_ratio(h.mean_cts_transmissions, h.mean_mn, 2.0);
  if (cfg.mn_override >= 0.0) per_slot_tx = 2.0;

  ProtocolLedger l;
  l.protocol = variant;
  const double eta = h.mean_eta;
  l.rows = {
      row(1, "T_c", Tc, "sender", 1, "transmit RTS", "P_tC", PtC, eta),
      row(2, "T_c+(N-1)T_s", Tc + (N - 1) * Ts, "sender", 1, "listen and activate BT while listening", "P_Rx+P_tBT", PL, eta),
      row(3, "T_c", Tc, "sender", 1, "transmit RTS", "P_tC", PtC, 1),
      row(4, "T_c", Tc, "awake nodes in PPA", listeners, "receive RTS, activate BT while receiving", "P_Rx+P_tBT", PL, 1),
      row(5, "m_e*T_s", h.mean_me * Ts, "awake nodes in PPA", me_listeners_count,
          "listen in anticipation of a CTS, activate BT while listening", "P_Rx+P_tBT", PL, 1),
      row(6, "m_e*T_s", h.mean_me * Ts, "sender", 1, "transmit CONTINUE in the 1st half of the slot", "P_tC/2", 0.5 * PtC, 1),
      row(7, "m_e*T_s", h.mean_me * Ts, "sender", 1, "wait for a CTS in the 2nd half of the slot, activate BT", "P_tC/2", 0.5 * PtC, 1),
      row(8, "m_n*T_s", h.mean_mn * Ts, "relays in the first non-empty subarea", per_slot_tx,
          "transmit CTS in the 1st half of the slot", "P_tC/2", 0.5 * PtC, 1),
      row(9, "m_n*T_s", h.mean_mn * Ts, "sender", 1, "detect colliding responses, transmit CONTINUE",
          "(P_tC+P_Rx+P_tBT)/2", 0.5 * (PtC + PL), 1),
      row(10, "T_c", Tc, "successful relay", 1, "transmit CTS", "P_tC", PtC, 1),
      row(11, "T_c", Tc, "sender", 1, "receive CTS, activate BT", "P_Rx+P_tBT", PL, 1),
      row(12, "T_c", Tc, "sender", 1, "inform successful relay", "P_tC", PtC, 1),
      row(13, "T_c", Tc, "successful relay", 1, "receive selection message, activate BT", "P_Rx+P_tBT", PL, 1),
      row(14, "T_p", Tp, "sender", 1, "transmit data payload", "P_tD", PtD, nT),
      row(15, "T_p", Tp, "selected relay", 1, "receive packet", "P_Rx+P_tBT", PL, nT),
      row(16, "T_c", Tc, "selected relay", 1, "transmit ACK/NACK", "P_tC", PtC, nT),
      row(17, "T_c", Tc, "sender", 1, "receive ACK/NACK, activate BT while receiving", "P_Rx+P_tBT", PL, nT),
  };
  finish(l);
  l.l_hop = geraf_delay(eta, h.mean_me, h.mean_mn, N, Ts, nT, Tp);
  return l;
}

ProtocolLedger build_boss_ledger(const OperatingPoint& op, const ScenarioConfig& cfg) {
  if (cfg.x < 2) throw std::invalid_argument("BOSS needs x >= 2");
  const auto& h = op.stats;
  const auto& g = op.geometry;
  const double Tp = cfg.T_p, Ts = op.T_s;
  const double PtC = op.P_tC, PtD = op.P_tD, PL = cfg.P_Rx + cfg.P_tBT;
  const int N = cfg.N, x = cfg.x;
  const double xN = static_cast<double>(x) * N;
  const double density = cfg.epsilon * cfg.rho;
  const double empty_w = cfg.boss_empty_window, col_w = cfg.boss_collision_window;
  const double j = cfg.boss_npa_cycles;
  const double npa_mean = density * g.npa_area;

  double rep_empty, rep_npa, rep_col, rep_succ, npa_count;
  double col_disk, col_me, col_me_disk1, colliders, collider_wait, succ_disk, succ_me, succ_me_disk1;
  if (cfg.averaging == Averaging::Exact) {
    // Cycles with an empty PPA either find the NPA empty too or hand the
    // packet to an NPA node without progress; both precede the PPA round.
    double npa_busy = -std::expm1(-npa_mean);
    rep_empty = h.mean_eta * (1.0 - npa_busy);
    rep_npa = h.mean_eta * npa_busy * j;
    npa_count = ztp_mean(npa_mean);
    auto b = boss_moments(g, cfg);
    rep_col = b.cc;
    rep_succ = 1.0;
    col_disk = safe_ratio(b.cc_disk, b.cc, 0.0);
    col_me = safe_ratio(b.cc_me, b.cc, 0.0);
    col_me_disk1 = safe_ratio(b.cc_me_disk1, b.cc_me, col_disk + 1.0);
    colliders = safe_ratio(b.cc_colliders, b.cc, 2.0);
    double wait_len = xN - col_me - 1.0;
    collider_wait = safe_ratio(b.cc_collider_wait, b.cc * wait_len, colliders);
    succ_disk = b.s_disk;
    succ_me = b.s_me;
    succ_me_disk1 = safe_ratio(b.s_me_disk1, b.s_me, succ_disk + 1.0);
  } else {
    rep_empty = h.mean_eta;
    rep_npa = h.p_npa * j;
    npa_count = npa_mean;
    rep_col = h.p_ppa * h.mean_eta_prime;
    rep_succ = h.p_ppa;
    double disk = (std::numbers::pi * g.range * g.range - (g.ppa_area - listeners_after(g, h.mean_me, 1.0))) * density;
    col_disk = succ_disk = disk;
    col_me = succ_me = h.mean_me_fine;
    col_me_disk1 = succ_me_disk1 = disk + 1.0;
    colliders = 2.0;
    collider_wait = colliders;
  }

  ProtocolLedger l;
  l.protocol = Protocol::Boss;
  l.rows = {
      row(1, "T_p", Tp, "sender", 1, "transmit RTS, payload included", "P_tD", PtD, rep_empty),
      row(2, "2xN*T_s", empty_w * xN * Ts, "sender", 1, "listen and activate BT", "P_Rx+P_tBT", PL, rep_empty),
      row(3, "T_p", Tp, "sender", 1, "transmit RTS", "P_tD", PtD, rep_npa),
      row(4, "T_p", Tp, "awake nodes in NPA", npa_count, "receive RTS, activate BT while receiving", "P_Rx+P_tBT", PL, rep_npa),
      row(5, "2xN*T_s", empty_w * xN * Ts, "awake nodes in NPA", npa_count, "transmit CTS in its own slot",
          "P_tC/(2xN)", PtC / (empty_w * xN), rep_npa),
      row(6, "2xN*T_s", empty_w * xN * Ts, "sender", 1, "receive CTS messages, activate BT", "P_Rx+P_tBT", PL, rep_npa),
      row(7, "T_s", Ts, "sender", 1, "select relay", "P_tC", PtC, rep_npa),
      row(8, "T_s", Ts, "successful relay", 1, "receive selection message, activate BT", "P_Rx+P_tBT", PL, rep_npa),
      row(9, "T_p", Tp, "sender", 1, "transmit RTS", "P_tD", PtD, rep_col),
      row(10, "T_p", Tp, "awake nodes in NPA and PPA", col_disk, "receive RTS, activate BT while receiving",
          "P_Rx+P_tBT", PL, rep_col),
      row(11, "m_e*T_s", col_me * Ts, "awake nodes in NPA and PPA plus sender", col_me_disk1,
          "listen in anticipation of a CTS, activate BT", "P_Rx+P_tBT", PL, rep_col),
      row(12, "T_s", Ts, "colliding relays", colliders, "send CTS on the same slot", "P_tC", PtC, rep_col),
      row(13, "T_s", Ts, "sender", 1, "attempt to receive the CTS, activate BT", "P_Rx+P_tBT", PL, rep_col),
      row(14, "(xN-m_e-1)T_s", std::max(0.0, xN - col_me - 1.0) * Ts, "colliding relays", collider_wait,
          "listen hoping for ACK from sender, activate BT", "P_Rx+P_tBT", PL, rep_col),
      row(15, "T_p", Tp, "sender", 1, "transmit RTS", "P_tD", PtD, rep_succ),
      row(16, "T_p", Tp, "awake nodes in NPA and PPA", succ_disk, "receive RTS, activate BT while receiving",
          "P_Rx+P_tBT", PL, rep_succ),
      row(17, "m_e*T_s", succ_me * Ts, "awake nodes in NPA and PPA plus sender", succ_me_disk1,
          "listen in anticipation of a CTS, activate BT", "P_Rx+P_tBT", PL, rep_succ),
      row(18, "T_s", Ts, "successful relay", 1, "transmit CTS", "P_tC", PtC, rep_succ),
      row(19, "T_s", Ts, "sender", 1, "receive CTS, activate BT", "P_Rx+P_tBT", PL, rep_succ),
      row(20, "T_s", Ts, "sender", 1, "inform successful relay", "P_tC", PtC, rep_succ),
      row(21, "T_s", Ts, "successful relay", 1, "receive selection message, activate BT", "P_Rx+P_tBT", PL, rep_succ),
  };
  finish(l);
  if (cfg.averaging == Averaging::Exact) {
    l.l_hop = rep_empty * (Tp + empty_w * xN * Ts) + rep_npa * (Tp + (empty_w * xN + 1.0) * Ts) +
              rep_col * (Tp + col_w * xN * Ts) + Tp + (succ_me + 2.0) * Ts;
  } else {
    l.l_hop = boss_delay(h.mean_eta, h.p_npa * j, h.p_ppa, h.mean_eta_prime, h.mean_me_fine, x, N, Ts, Tp,
                         empty_w, col_w);
  }
  return l;
}

ProtocolLedger build_opt_ledger(const OperatingPoint& op, const ScenarioConfig& cfg) {
  const auto& h = op.stats;
  const auto& g = op.geometry;
  const double Tc = cfg.T_c, Tp = cfg.T_p;
  const double PtC = op.P_tC, PtD = op.P_tD, PL = cfg.P_Rx + cfg.P_tBT;
  const int N = cfg.N;
  double listeners, me_listeners;
  if (cfg.averaging == Averaging::Exact) {
    auto m = geraf_moments(g, cfg);
    listeners = m.listeners;
    me_listeners = safe_ratio(m.me_listeners, h.mean_me, listeners) + 1.0;
  } else {
    listeners = listeners_after(g, h.mean_me, cfg.epsilon * cfg.rho);
    me_listeners = listeners + 1.0;
  }
  ProtocolLedger l;
  l.protocol = Protocol::RtsCtsDataOpt;
  const double eta = h.mean_eta;
  l.rows = {
      row(1, "T_c", Tc, "sender", 1, "transmit RTS", "P_tD", PtD, eta),
      row(2, "N*T_c", N * Tc, "sender", 1, "listen and activate BT", "P_Rx+P_tBT", PL, eta),
      row(3, "T_c", Tc, "sender", 1, "transmit RTS", "P_tD", PtD, 1),
      row(4, "T_c", Tc, "awake nodes in PPA", listeners, "receive RTS, activate BT while receiving", "P_Rx+P_tBT", PL, 1),
      row(5, "m_e*T_c", h.mean_me * Tc, "awake nodes in PPA plus sender", me_listeners,
          "listen in anticipation of a CTS, activate BT", "P_Rx+P_tBT", PL, 1),
      row(6, "T_c", Tc, "successful relay", 1, "transmit CTS", "P_tC", PtC, 1),
      row(7, "T_c", Tc, "sender", 1, "receive CTS, activate BT", "P_Rx+P_tBT", PL, 1),
      row(8, "T_c", Tc, "sender", 1, "inform successful relay", "P_tC", PtC, 1),
      row(9, "T_c", Tc, "successful relay", 1, "receive selection message, activate BT", "P_Rx+P_tBT", PL, 1),
      row(10, "T_p", Tp, "sender", 1, "transmit packet", "P_tD", PtD, 1),
      row(11, "T_p", Tp, "relay", 1, "receive packet", "P_Rx+P_tBT", PL, 1),
  };
  finish(l);
  l.l_hop = opt_delay(eta, h.mean_me, N, Tc, Tp);
  return l;
}

ProtocolLedger build_ledger(const OperatingPoint& op, const ScenarioConfig& cfg) {
  switch (op.protocol) {
    case Protocol::GerafPc:
    case Protocol::GerafMrc: return build_geraf_ledger(op.protocol, op, cfg);
    case Protocol::Boss: return build_boss_ledger(op, cfg);
    case Protocol::RtsCtsDataOpt: return build_opt_ledger(op, cfg);
  }
  throw std::logic_error("unhandled protocol");
}

EndToEndResult end_to_end(const ProtocolLedger& ledger, double q,
                          const std::optional<EndToEndResult>& opt_baseline, double phi,
                          long payload_bits) {
  if (!(q >= 1.0)) throw std::invalid_argument("hop count must be at least 1");
  if (payload_bits < 1) throw std::invalid_argument("payload must carry at least one bit");
  EndToEndResult r;
  r.protocol = ledger.protocol;
  r.e_hop = ledger.e_hop;
  r.l_hop = ledger.l_hop;
  r.hops = q;
  r.e_e2e = q * ledger.e_hop;
  r.l_e2e = q * ledger.l_hop;
  r.energy_per_bit = r.e_e2e / static_cast<double>(payload_bits);
  r.delay_per_bit = r.l_e2e / static_cast<double>(payload_bits);
  if (opt_baseline) {
    if (!(opt_baseline->e_e2e > 0.0) || !(opt_baseline->l_e2e > 0.0))
      throw std::invalid_argument("baseline energy and delay must be positive");
    r.composite = phi * r.e_e2e / opt_baseline->e_e2e + (1.0 - phi) * r.l_e2e / opt_baseline->l_e2e;
  } else if (ledger.protocol == Protocol::RtsCtsDataOpt) {
    r.composite = 1.0;
  } else {
    throw std::invalid_argument("composite cost needs the opt baseline");
  }
  return r;
}

std::string serialize_ledger(const ProtocolLedger& l) {
  std::ostringstream os;
  os << "# " << protocol_name(l.protocol) << " E_hop_J=" << format_number(l.e_hop)
     << " l_hop_s=" << format_number(l.l_hop) << "\n";
  os << "activity\tduration\tcount\ttask\tpower_factor\trepeat\tenergy_J\n";
  for (const auto& r : l.rows) {
    os << r.id << '\t' << r.label << '=' << format_number(r.duration) << '\t' << format_number(r.count) << " ("
       << r.nodes << ")\t" << r.task << '\t' << r.power_label << '=' << format_number(r.power) << '\t'
       << format_number(r.repeat) << '\t' << format_number(r.energy()) << '\n';
  }
  return os.str();
}

}  // namespace georoute
