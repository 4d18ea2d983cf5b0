#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "georoute/scenarios.hpp"

namespace georoute {

enum class PlotMetric { Delay, DelayPerBit, Energy, EnergyPerBit, Composite, Hops };

PlotMetric parse_plot_metric(std::string_view s);
std::string_view plot_metric_name(PlotMetric m);
double plot_metric_value(const EndToEndResult& r, PlotMetric m);

struct PlotFile {
  std::string name;  // <layout>_<subfig>.csv
  std::string content;
};

struct Subfigure {
  std::string name;
  PlotMetric metric = PlotMetric::Composite;
};

// One panel is one sweep; a layout is one or more panels.
struct LayoutPanel {
  std::string preset;
  std::vector<std::string> overrides;  // key=value applied after the preset
  SweepSpec sweep;
  std::vector<Subfigure> subfigures;
};

std::vector<std::string> layout_names();  // fig3..fig7 and custom
bool is_figure_layout(std::string_view layout);
std::vector<LayoutPanel> layout_panels(std::string_view layout);

// Columns x,<protocols of the table in first-seen order>. Infeasible cells
// are left empty. Throws when the table does not fit the layout.
std::vector<PlotFile> emit_plot_data(const SweepResult& table, std::string_view layout,
                                     const std::vector<Subfigure>& subfigures);

struct LayoutRun {
  std::vector<SweepResult> tables;
  std::vector<PlotFile> files;
};

// Runs every panel of a figure layout. Overrides are applied on top of each
// panel's own settings.
LayoutRun run_layout(std::string_view layout, const std::vector<std::string>& overrides = {},
                     unsigned threads = 0);

}  // namespace georoute
