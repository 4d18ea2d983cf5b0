#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "georoute/plotdata.hpp"

using namespace georoute;

namespace {
std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }
}  // namespace

TEST_CASE("plot files have one row per value and one column per protocol") {
  SweepSpec spec{"rho", {"0.1", "1", "10"}, {Protocol::GerafPc, Protocol::Boss}};
  auto table = run_sweep(spec, ScenarioConfig{}, 1);
  auto files = emit_plot_data(table, "fig3", {{"delay", PlotMetric::Delay}, {"composite", PlotMetric::Composite}});
  REQUIRE(files.size() == 2);
  CHECK(files[0].name == "fig3_delay.csv");
  CHECK(files[1].name == "fig3_composite.csv");
  CHECK(files[0].content.rfind("x,geraf-pc,boss,opt\n", 0) == 0);
  CHECK(count_lines(files[0].content) == 4);
  std::istringstream in(files[1].content);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line.substr(line.rfind(',') + 1) == "1");
  // idempotent
  CHECK(emit_plot_data(table, "fig3", {{"delay", PlotMetric::Delay}})[0].content == files[0].content);
}

TEST_CASE("mismatched tables are rejected") {
  SweepSpec spec{"N", {"2", "4"}, {Protocol::GerafPc}};
  auto table = run_sweep(spec, ScenarioConfig{}, 1);
  CHECK_THROWS_AS(emit_plot_data(table, "fig3", {{"delay", PlotMetric::Delay}}), std::invalid_argument);
  CHECK_THROWS_AS(emit_plot_data(table, "fig9", {{"delay", PlotMetric::Delay}}), std::invalid_argument);
  CHECK_THROWS_AS(emit_plot_data(table, "fig6", {{"hop", PlotMetric::Hops}}), std::invalid_argument);
  CHECK_THROWS_AS(emit_plot_data(table, "fig6", {}), std::invalid_argument);
  CHECK_NOTHROW(emit_plot_data(table, "fig6", {{"composite", PlotMetric::Composite}}));
  CHECK_NOTHROW(emit_plot_data(table, "custom", {{"hops", PlotMetric::Hops}}));
  CHECK_THROWS_AS(emit_plot_data(SweepResult{}, "custom", {{"hops", PlotMetric::Hops}}), std::invalid_argument);
}

TEST_CASE("infeasible cells stay empty") {
  ScenarioConfig base;
  base.T_p = 1.0;
  SweepSpec spec{"per_target", {"0.1", "0.001"}, {Protocol::GerafPc}};
  auto files = emit_plot_data(run_sweep(spec, base, 1), "custom", {{"delay", PlotMetric::Delay}});
  CHECK(files[0].content.find("\n0.001,,\n") != std::string::npos);
}

TEST_CASE("figure layouts") {
  CHECK(is_figure_layout("fig5"));
  CHECK_FALSE(is_figure_layout("custom"));
  CHECK(layout_panels("fig4").size() == 2);
  CHECK(layout_panels("fig6").size() == 5);
  CHECK_THROWS_AS(layout_panels("custom"), std::invalid_argument);
  auto run = run_layout("fig5", {}, 1);
  REQUIRE(run.files.size() == 4);
  for (const auto& f : run.files) {
    CHECK(f.name.rfind("fig5_", 0) == 0);
    CHECK(count_lines(f.content) == 1 + mcs_ladder().size());
  }
  CHECK(parse_plot_metric(plot_metric_name(PlotMetric::EnergyPerBit)) == PlotMetric::EnergyPerBit);
}
