#pragma once

#include <string>
#include <vector>

#include "georoute/config.hpp"
#include "georoute/protocols.hpp"

namespace georoute {

std::vector<std::string> preset_names();
ScenarioConfig preset(std::string_view name);

struct Evaluation {
  ScenarioConfig cfg;
  LinkBudget link;
  std::vector<EndToEndResult> results;  // requested protocols, then opt if not requested
  bool infeasible = false;
  std::string reason;

  const EndToEndResult* find(Protocol p) const;
};

// Full pipeline: link budget, geometry, hop statistics, ledgers, hop count
// and end-to-end metrics. Infeasible links are reported, not thrown.
Evaluation evaluate(const ScenarioConfig& cfg, const std::vector<Protocol>& protocols);

struct SweepSpec {
  std::string parameter;
  std::vector<std::string> values;
  std::vector<Protocol> protocols;
};

struct SweepRow {
  std::string value;
  EndToEndResult result;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRow> rows;  // ordered by (value, protocol)
};

// Points run in parallel; rows are assembled in value order.
SweepResult run_sweep(const SweepSpec& spec, const ScenarioConfig& base, unsigned threads = 0);

std::string sweep_csv_header();
std::string sweep_csv(const SweepResult& r);

enum class Metric { Delay, Energy, Composite };
Metric parse_metric(std::string_view s);
double metric_value(const EndToEndResult& r, Metric m);

struct OptimizationResult {
  int best_N = 1;
  double best_value = 0.0;
  std::vector<std::pair<int, double>> curve;
};

OptimizationResult optimize_subareas(const ScenarioConfig& base, Protocol protocol,
                                     const std::vector<int>& N_range, Metric metric);

// Values spaced evenly in log10 between lo and hi inclusive.
std::vector<double> log_grid(double lo, double hi, int points);

}  // namespace georoute
