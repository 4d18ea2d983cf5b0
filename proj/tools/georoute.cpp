#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "georoute/config.hpp"
#include "georoute/plotdata.hpp"
#include "georoute/protocols.hpp"
#include "georoute/scenarios.hpp"
#include "georoute/simulator.hpp"
#include "georoute/validation.hpp"

using namespace georoute;

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string preset = "default";
  std::string config;
  std::vector<std::string> sets;
  std::string protocols;
  std::uint64_t seed = 1;
  bool seed_given = false;
  long trials = -1;
  std::string out;
  std::string layout;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--preset", c.preset, "base scenario (default, vanet, rescue, sun, environmental)");
  cmd->add_option("--config", c.config, "key=value scenario file applied on top of the preset");
  cmd->add_option("--set", c.sets, "KEY=VALUE override, repeatable")->allow_extra_args(false);
  cmd->add_option("--protocols", c.protocols, "comma list of geraf-pc, geraf-mrc, boss, opt or all");
  cmd->add_option("--seed", c.seed, "random seed")->each([&c](const std::string&) { c.seed_given = true; });
  cmd->add_option("--trials", c.trials, "Monte Carlo trials");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--layout", c.layout, "plot layout (fig3..fig7, custom)");
  cmd->add_option("--threads", c.threads, "worker threads, 0 for all cores");
}

void apply_set(ScenarioConfig& cfg, const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--set expects KEY=VALUE, got '" + kv + "'");
  set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
}

ScenarioConfig build_config(const Common& c) {
  ScenarioConfig cfg = preset(c.preset);
  if (!c.config.empty()) {
    if (!std::filesystem::exists(c.config)) throw UsageError("config file '" + c.config + "' not found");
    cfg = load_config_file(c.config, cfg);
  }
  for (const auto& kv : c.sets) apply_set(cfg, kv);
  if (c.seed_given) cfg.hop_seed = c.seed;
  cfg.validate();
  return cfg;
}

std::vector<Protocol> protocols_or(const Common& c, std::vector<Protocol> fallback) {
  if (c.protocols.empty()) return fallback;
  return parse_protocol_list(c.protocols);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (std::filesystem::path(dir) / name).string());
  f << content;
}

std::string results_csv(const std::string& label, const std::vector<EndToEndResult>& results) {
  SweepResult table;
  for (const auto& r : results) table.rows.push_back({label, r});
  return sweep_csv(table);
}

int cmd_evaluate(const Common& c) {
  ScenarioConfig cfg = build_config(c);
  auto protocols = protocols_or(c, {Protocol::GerafPc, Protocol::GerafMrc, Protocol::Boss});
  Evaluation ev = evaluate(cfg, protocols);
  std::string csv = results_csv(cfg.name, ev.results);
  std::cout << csv;
  if (!c.out.empty()) {
    write_file(c.out, "evaluate.csv", csv);
    write_file(c.out, "config.cfg", format_config(cfg));
    if (!ev.infeasible) {
      LinkBudget link = link_budget_for(cfg);
      for (const auto& r : ev.results) {
        OperatingPoint op = operating_point(r.protocol, cfg, link);
        write_file(c.out, "ledger_" + std::string(protocol_name(r.protocol)) + ".tsv",
                   serialize_ledger(build_ledger(op, cfg)));
      }
    }
  }
  if (ev.infeasible) {
    std::cerr << "error: infeasible: " << ev.reason << "\n";
    return kInfeasible;
  }
  return kOk;
}

bool any_infeasible(const SweepResult& t) {
  for (const auto& row : t.rows)
    if (row.result.infeasible) return true;
  return false;
}

int cmd_sweep(const Common& c, const std::string& param, const std::string& values, const std::string& metrics) {
  bool infeasible = false;
  if (is_figure_layout(c.layout)) {
    if (!c.config.empty() || c.preset != "default")
      throw UsageError("layout " + c.layout + " fixes its own scenario; adjust it with --set");
    if (!param.empty() || !values.empty()) throw UsageError("layout " + c.layout + " fixes its own sweep");
    std::vector<std::string> sets = c.sets;
    if (c.seed_given) sets.push_back("hop_seed=" + std::to_string(c.seed));
    LayoutRun run = run_layout(c.layout, sets, c.threads);
    for (std::size_t i = 0; i < run.tables.size(); ++i) {
      std::string csv = sweep_csv(run.tables[i]);
      std::cout << csv;
      infeasible = infeasible || any_infeasible(run.tables[i]);
      if (!c.out.empty()) {
        std::string name = c.layout + "_sweep" + (run.tables.size() > 1 ? std::to_string(i + 1) : "") + ".csv";
        write_file(c.out, name, csv);
      }
    }
    if (!c.out.empty())
      for (const auto& f : run.files) write_file(c.out, f.name, f.content);
  } else {
    if (!c.layout.empty() && c.layout != "custom")
      throw UsageError("unknown layout '" + c.layout + "' (fig3, fig4, fig5, fig6, fig7, custom)");
    if (param.empty() || values.empty()) throw UsageError("sweep needs --param and --values, or a figure --layout");
    ScenarioConfig cfg = build_config(c);
    SweepSpec spec{param, split_list(values), protocols_or(c, {Protocol::GerafPc, Protocol::GerafMrc, Protocol::Boss})};
    SweepResult table = run_sweep(spec, cfg, c.threads);
    std::string csv = sweep_csv(table);
    std::cout << csv;
    infeasible = any_infeasible(table);
    if (!c.out.empty()) {
      write_file(c.out, "sweep.csv", csv);
      if (c.layout == "custom" || !metrics.empty()) {
        std::vector<Subfigure> subs;
        for (const auto& m : split_list(metrics.empty() ? "composite" : metrics))
          subs.push_back({m, parse_plot_metric(m)});
        for (const auto& f : emit_plot_data(table, "custom", subs)) write_file(c.out, f.name, f.content);
      }
    }
  }
  if (infeasible) {
    std::cerr << "error: infeasible cells in the sweep (marked infeasible=1)\n";
    return kInfeasible;
  }
  return kOk;
}

int cmd_optimize(const Common& c, const std::string& metric_name, int n_min, int n_max) {
  ScenarioConfig cfg = build_config(c);
  auto protocols = protocols_or(c, {Protocol::GerafPc});
  if (protocols.size() != 1) throw UsageError("optimize takes exactly one protocol");
  if (n_min < 1 || n_max < n_min) throw UsageError("--n-min and --n-max must satisfy 1 <= min <= max");
  Metric metric = parse_metric(metric_name);
  std::vector<int> range;
  for (int n = n_min; n <= n_max; ++n) range.push_back(n);
  OptimizationResult r;
  try {
    r = optimize_subareas(cfg, protocols.front(), range, metric);
  } catch (const InfeasibleError& e) {
    std::cerr << "error: infeasible: " << e.what() << "\n";
    return kInfeasible;
  }
  std::ostringstream os;
  os << "N," << metric_name << "\n";
  for (const auto& [n, v] : r.curve) os << n << ',' << format_number(v) << "\n";
  std::string best = "best_N=" + std::to_string(r.best_N) + " " + metric_name + "=" + format_number(r.best_value) + "\n";
  std::cout << os.str() << best;
  if (!c.out.empty()) {
    write_file(c.out, "optimize.csv", os.str());
    write_file(c.out, "optimize_best.txt", best);
  }
  return kOk;
}

int cmd_simulate(const Common& c) {
  ScenarioConfig cfg = build_config(c);
  auto protocols = protocols_or(c, std::vector<Protocol>(std::begin(kAllProtocols), std::end(kAllProtocols)));
  long trials = c.trials < 0 ? 100 : c.trials;
  if (trials < 1) throw UsageError("--trials must be positive");
  Evaluation ev = evaluate(cfg, protocols);
  if (ev.infeasible) {
    std::cerr << "error: infeasible: " << ev.reason << "\n";
    return kInfeasible;
  }
  std::ostringstream os;
  os << "protocol,trials,outages,E_e2e_J,E_e2e_stderr,l_e2e_s,l_e2e_stderr,q,q_stderr,E_e2e_analytic_J,"
        "l_e2e_analytic_s,q_analytic\n";
  for (Protocol p : protocols) {
    RouteSummary s = simulate_routes(cfg, p, trials, c.seed, c.threads);
    const EndToEndResult* a = ev.find(p);
    os << protocol_name(p) << ',' << s.trials << ',' << s.outages << ',' << format_number(s.energy.mean) << ','
       << format_number(s.energy.stderr_mean) << ',' << format_number(s.delay.mean) << ','
       << format_number(s.delay.stderr_mean) << ',' << format_number(s.hops.mean) << ','
       << format_number(s.hops.stderr_mean) << ',' << format_number(a->e_e2e) << ',' << format_number(a->l_e2e)
       << ',' << format_number(a->hops) << "\n";
    if (!c.out.empty()) {
      SimOptions opt;
      opt.record_events = true;
      RouteResult first = simulate_route(cfg, p, c.seed, 0, opt);
      write_file(c.out, "events_" + std::string(protocol_name(p)) + ".csv", event_log_csv(first.trace.event_log));
    }
  }
  std::cout << os.str();
  if (!c.out.empty()) write_file(c.out, "simulate.csv", os.str());
  return kOk;
}

int cmd_scenarios(const Common& c) {
  for (const auto& name : preset_names()) {
    ScenarioConfig cfg = preset(name);
    std::cout << name << ": epsilon=" << format_number(cfg.epsilon) << " phi=" << format_number(cfg.phi)
              << " rho=" << format_number(cfg.rho) << " T_p=" << format_number(cfg.T_p)
              << " P_tmax=" << format_number(cfg.P_tmax) << " taps=" << cfg.channel.multipath_count << "\n";
    if (!c.out.empty()) write_file(c.out, name + ".cfg", format_config(cfg));
  }
  return kOk;
}

int cmd_validate(const Common& c, const std::string& criteria, bool verbose, const std::string& self) {
  ValidationOptions o;
  o.seed = c.seed;
  o.threads = c.threads;
  if (c.trials > 0) o.oracle_trials = c.trials;
  std::error_code ec;
  auto exe = std::filesystem::read_symlink("/proc/self/exe", ec);
  o.cli_path = ec ? self : exe.string();
  std::vector<int> ids;
  if (criteria.empty() || criteria == "all") {
    for (int i = 1; i <= 10; ++i) ids.push_back(i);
  } else {
    for (const auto& s : split_list(criteria)) {
      try {
        ids.push_back(std::stoi(s));
      } catch (const std::exception&) {
        throw UsageError("criteria are numbers 1..10, got '" + s + "'");
      }
      if (ids.back() < 1 || ids.back() > 10) throw UsageError("criteria are numbered 1 to 10");
    }
  }
  bool all = true;
  std::string report;
  for (int id : ids) {
    CriterionResult r = run_criterion(id, o);
    all = all && r.pass;
    std::string text = format_criterion(r, verbose);
    std::cout << text << std::flush;
    report += text;
  }
  std::string dom = "dominance of the opt baseline:\n";
  for (const auto& l : dominance_report()) dom += "    " + l.name + ": " + l.detail + "\n";
  std::cout << dom;
  if (!c.out.empty()) write_file(c.out, "validate.txt", report + dom);
  return all ? kOk : kInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"georoute: energy and delay of beaconless geographic routing handshakes"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common c;
  std::string param, values, metrics, metric = "composite", criteria;
  int n_min = 1, n_max = 16;
  bool verbose = false;

  auto* evaluate_cmd = app.add_subcommand("evaluate", "end-to-end metrics for each protocol plus the opt baseline");
  add_common(evaluate_cmd, c);
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep one parameter, or run a figure layout");
  add_common(sweep_cmd, c);
  sweep_cmd->add_option("--param", param, "swept configuration key");
  sweep_cmd->add_option("--values", values, "comma list of values");
  sweep_cmd->add_option("--metrics", metrics, "plot metrics for the custom layout");
  auto* optimize_cmd = app.add_subcommand("optimize", "scan the number of forwarding subareas");
  add_common(optimize_cmd, c);
  optimize_cmd->add_option("--metric", metric, "delay, energy or composite");
  optimize_cmd->add_option("--n-min", n_min, "smallest N");
  optimize_cmd->add_option("--n-max", n_max, "largest N");
  auto* simulate_cmd = app.add_subcommand("simulate", "discrete-event Monte Carlo of whole routes");
  add_common(simulate_cmd, c);
  auto* list_cmd = app.add_subcommand("scenario-list", "list the scenario presets");
  add_common(list_cmd, c);
  auto* validate_cmd = app.add_subcommand("validate", "run the oracle and acceptance checks");
  add_common(validate_cmd, c);
  validate_cmd->add_option("--criteria", criteria, "comma list of criterion numbers (default all)");
  validate_cmd->add_flag("--verbose", verbose, "show passing checks too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*evaluate_cmd) return cmd_evaluate(c);
    if (*sweep_cmd) return cmd_sweep(c, param, values, metrics);
    if (*optimize_cmd) return cmd_optimize(c, metric, n_min, n_max);
    if (*simulate_cmd) return cmd_simulate(c);
    if (*list_cmd) return cmd_scenarios(c);
    if (*validate_cmd) return cmd_validate(c, criteria, verbose, argv[0]);
  } catch (const InfeasibleError& e) {
    std::cerr << "error: infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasible;
  }
  return kUsage;
}
