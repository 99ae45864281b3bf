#pragma once

#include <filesystem>
#include <string_view>
#include <utility>
#include <vector>

#include "maxlat/io.hpp"

namespace maxlat::plot {

/// Self-contained SVG line plot, one polyline per series, deterministic
/// byte output for identical input.
void render_line_plot(const std::vector<io::NamedSeries>& series,
                      const std::filesystem::path& path, std::string_view x_label,
                      std::string_view y_label);

/// XY mode: one series plotted against another, matched index by index.
void render_xy_plot(const analysis::Series& abscissa, const analysis::Series& ordinate,
                    const std::filesystem::path& path, std::string_view x_label,
                    std::string_view y_label);

} // namespace maxlat::plot
