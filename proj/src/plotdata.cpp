#include "georoute/plotdata.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace georoute {

PlotMetric parse_plot_metric(std::string_view s) {
  if (s == "delay") return PlotMetric::Delay;
  if (s == "delay_per_bit") return PlotMetric::DelayPerBit;
  if (s == "energy") return PlotMetric::Energy;
  if (s == "energy_per_bit") return PlotMetric::EnergyPerBit;
  if (s == "composite") return PlotMetric::Composite;
  if (s == "hops") return PlotMetric::Hops;
  throw std::invalid_argument("unknown plot metric '" + std::string(s) +
                              "' (delay, delay_per_bit, energy, energy_per_bit, composite, hops)");
}

std::string_view plot_metric_name(PlotMetric m) {
  switch (m) {
    case PlotMetric::Delay: return "delay";
    case PlotMetric::DelayPerBit: return "delay_per_bit";
    case PlotMetric::Energy: return "energy";
    case PlotMetric::EnergyPerBit: return "energy_per_bit";
    case PlotMetric::Composite: return "composite";
    case PlotMetric::Hops: return "hops";
  }
  return "composite";
}

double plot_metric_value(const EndToEndResult& r, PlotMetric m) {
  switch (m) {
    case PlotMetric::Delay: return r.l_e2e;
    case PlotMetric::DelayPerBit: return r.delay_per_bit;
    case PlotMetric::Energy: return r.e_e2e;
    case PlotMetric::EnergyPerBit: return r.energy_per_bit;
    case PlotMetric::Composite: return r.composite;
    case PlotMetric::Hops: return r.hops;
  }
  return r.composite;
}

std::vector<std::string> layout_names() { return {"fig3", "fig4", "fig5", "fig6", "fig7", "custom"}; }

bool is_figure_layout(std::string_view layout) {
  auto names = layout_names();
  return layout != "custom" && std::find(names.begin(), names.end(), layout) != names.end();
}

namespace {

std::vector<std::string> numbers(const std::vector<double>& v) {
  std::vector<std::string> out;
  for (double x : v) out.push_back(format_number(x));
  return out;
}

const std::vector<Protocol> kThree = {Protocol::GerafPc, Protocol::GerafMrc, Protocol::Boss};

// The density ladder shared by the fig3 sweep and the fig6 optimizer.
const std::vector<double> kDensityLadder = {0.01, 0.1, 1.0, 10.0, 100.0};

// Which swept parameters each figure layout accepts.
std::vector<std::string> expected_parameters(std::string_view layout) {
  if (layout == "fig3") return {"rho"};
  if (layout == "fig4") return {"rho", "P_tmax_dBm", "P_tmax"};
  if (layout == "fig5") return {"mcs"};
  if (layout == "fig6") return {"N"};
  if (layout == "fig7") return {"T_p"};
  return {};
}

}  // namespace

std::vector<LayoutPanel> layout_panels(std::string_view layout) {
  std::vector<LayoutPanel> panels;
  if (layout == "fig3") {
    panels.push_back({"environmental",
                      {},
                      {"rho", numbers(log_grid(0.01, 100.0, 9)), kThree},
                      {{"delay", PlotMetric::Delay},
                       {"energy_per_bit", PlotMetric::EnergyPerBit},
                       {"composite", PlotMetric::Composite}}});
  } else if (layout == "fig4") {
    panels.push_back({"vanet",
                      {},
                      {"rho", numbers(log_grid(0.003, 3.0, 7)), kThree},
                      {{"composite_density", PlotMetric::Composite}}});
    panels.push_back({"vanet",
                      {},
                      {"P_tmax_dBm", {"10", "13", "16", "19", "22", "25"}, kThree},
                      {{"composite_power", PlotMetric::Composite}}});
  } else if (layout == "fig5") {
    std::vector<std::string> names;
    for (const auto& m : mcs_ladder()) names.push_back(m.name());
    panels.push_back({"rescue",
                      {},
                      {"mcs", names, kThree},
                      {{"delay", PlotMetric::Delay},
                       {"delay_per_bit", PlotMetric::DelayPerBit},
                       {"energy_per_bit", PlotMetric::EnergyPerBit},
                       {"composite", PlotMetric::Composite}}});
  } else if (layout == "fig6") {
    std::vector<std::string> ns;
    for (int n = 1; n <= 16; ++n) ns.push_back(std::to_string(n));
    for (double rho : kDensityLadder) {
      std::string v = format_number(rho);
      panels.push_back({"environmental",
                        {"rho=" + v},
                        {"N", ns, {Protocol::GerafPc}},
                        {{"composite_rho" + v, PlotMetric::Composite}}});
    }
  } else if (layout == "fig7") {
    // Whole multiples of the coherence time, so every packet spans complete
    // fading blocks; a sparse field where the contention windows dominate.
    panels.push_back({"environmental",
                      {"rho=0.01", "N=16", "P_tmax_dBm=20"},
                      {"T_p", {"0.0014", "0.0028", "0.0042", "0.0056", "0.007"}, kThree},
                      {{"delay_per_bit", PlotMetric::DelayPerBit},
                       {"energy_per_bit", PlotMetric::EnergyPerBit},
                       {"composite", PlotMetric::Composite}}});
  } else if (layout == "custom") {
    throw std::invalid_argument("the custom layout takes its sweep from the command line");
  } else {
    throw std::invalid_argument("unknown layout '" + std::string(layout) + "' (fig3..fig7, custom)");
  }
  return panels;
}

std::vector<PlotFile> emit_plot_data(const SweepResult& table, std::string_view layout,
                                     const std::vector<Subfigure>& subfigures) {
  auto names = layout_names();
  if (std::find(names.begin(), names.end(), layout) == names.end())
    throw std::invalid_argument("unknown layout '" + std::string(layout) + "'");
  if (table.rows.empty()) throw std::invalid_argument("result table is empty");
  if (subfigures.empty()) throw std::invalid_argument("layout needs at least one metric");
  auto params = expected_parameters(layout);
  if (!params.empty() && std::find(params.begin(), params.end(), table.spec.parameter) == params.end())
    throw std::invalid_argument("layout " + std::string(layout) + " does not plot a sweep over '" +
                                table.spec.parameter + "'");
  if (layout == "fig6")
    for (const auto& s : subfigures)
      if (s.metric != PlotMetric::Composite && s.metric != PlotMetric::Delay && s.metric != PlotMetric::Energy)
        throw std::invalid_argument("fig6 optimizes delay, energy or composite, not " +
                                    std::string(plot_metric_name(s.metric)));

  std::vector<Protocol> protocols;
  std::vector<std::string> values;
  std::map<std::pair<std::string, Protocol>, const EndToEndResult*> cell;
  for (const auto& row : table.rows) {
    if (std::find(protocols.begin(), protocols.end(), row.result.protocol) == protocols.end())
      protocols.push_back(row.result.protocol);
    if (std::find(values.begin(), values.end(), row.value) == values.end()) values.push_back(row.value);
    cell[{row.value, row.result.protocol}] = &row.result;
  }

  std::vector<PlotFile> files;
  for (const auto& sub : subfigures) {
    std::ostringstream os;
    os << "x";
    for (Protocol p : protocols) os << ',' << protocol_name(p);
    os << '\n';
    for (const auto& v : values) {
      os << v;
      for (Protocol p : protocols) {
        os << ',';
        auto it = cell.find({v, p});
        if (it != cell.end() && !it->second->infeasible) os << format_number(plot_metric_value(*it->second, sub.metric));
      }
      os << '\n';
    }
    files.push_back({std::string(layout) + "_" + sub.name + ".csv", os.str()});
  }
  return files;
}

LayoutRun run_layout(std::string_view layout, const std::vector<std::string>& overrides, unsigned threads) {
  LayoutRun run;
  auto panels = layout_panels(layout);
  auto apply = [](ScenarioConfig& c, const std::string& kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("override '" + kv + "' is not KEY=VALUE");
    set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
  };
  std::ostringstream optimum;
  optimum << "x,geraf-pc\n";
  for (const auto& panel : panels) {
    ScenarioConfig base = preset(panel.preset);
    for (const auto& kv : panel.overrides) apply(base, kv);
    for (const auto& kv : overrides) apply(base, kv);
    SweepResult table = run_sweep(panel.sweep, base, threads);
    auto files = emit_plot_data(table, layout, panel.subfigures);
    run.files.insert(run.files.end(), files.begin(), files.end());
    if (layout == "fig6") {
      // smallest N wins ties, as in optimize_subareas
      double best = std::numeric_limits<double>::infinity();
      std::string best_n;
      for (const auto& row : table.rows) {
        if (row.result.protocol != Protocol::GerafPc || row.result.infeasible) continue;
        if (row.result.composite < best) {
          best = row.result.composite;
          best_n = row.value;
        }
      }
      optimum << format_number(base.rho) << ',' << best_n << '\n';
    }
    run.tables.push_back(std::move(table));
  }
  if (layout == "fig6") run.files.push_back({"fig6_optimum.csv", optimum.str()});
  return run;
}

}  // namespace georoute
