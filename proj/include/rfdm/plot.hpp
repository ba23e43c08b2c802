#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>

#include "rfdm/roc.hpp"

namespace rfdm {

struct PlotSeries {
  std::string label;
  RocCurve curve;
};

struct PlotLayout {
  double width = 520.0;
  double height = 520.0;
  double margin = 60.0;
};

/// Pixel position of an ROC point: plot area [margin, size - margin], y up.
std::pair<double, double> plot_position(const RocPoint& p, const PlotLayout& layout = {});

std::string render_roc_svg(std::span<const PlotSeries> series, const PlotLayout& layout = {});

/// Writes render_roc_svg to `path`; throws Error if the file cannot be written.
void emit_plot(std::span<const PlotSeries> series, const std::filesystem::path& path,
               const PlotLayout& layout = {});

}  // namespace rfdm
