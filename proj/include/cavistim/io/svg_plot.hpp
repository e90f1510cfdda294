#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cavistim/io/csv.hpp"

namespace cavistim::io {

struct PlotSpec {
    std::string title;
    std::string x = "t";
    /// Columns drawn as lines. Empty means every column except x and trace_err.
    std::vector<std::string> y;
    /// When set, rows are split into one line per distinct value of this column.
    std::string group_by;
    std::string x_label;
    std::string y_label;
};

inline constexpr int kCanvasWidth = 960;
inline constexpr int kCanvasHeight = 540;

/// Deterministic SVG text. Throws CsvError naming any missing column.
std::string render_svg(const CsvTable& table, const PlotSpec& spec);

/// Reads csv_path and writes the plot next to it (same stem, .svg) unless
/// svg_path is given. Returns the path written.
std::filesystem::path render_plot(const std::filesystem::path& csv_path, const PlotSpec& spec,
                                  std::filesystem::path svg_path = {});

}  // namespace cavistim::io
