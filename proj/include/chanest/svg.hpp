#pragma once

#include <string>
#include <vector>

#include "chanest/types.hpp"

namespace chanest {

struct SvgSeries {
    std::string label;
    std::vector<scalar_t> x;
    std::vector<scalar_t> y;
};

/**
 * Minimal line plot: axes, ticks, one polyline per series, optional log-10
 * y axis (nonpositive values are dropped there).
 */
void write_svg_plot(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<SvgSeries>& series, bool log_y);

}  // namespace chanest
