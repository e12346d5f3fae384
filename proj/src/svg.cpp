#include "chanest/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace chanest {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                         "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"};

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<SvgSeries>& series, bool log_y) {
    const int width = 720, height = 480;
    const int ml = 70, mr = 20, mt = 40, mb = 55;

    scalar_t x_min = std::numeric_limits<scalar_t>::infinity(), x_max = -x_min;
    scalar_t y_min = x_min, y_max = -x_min;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            scalar_t y = s.y[i];
            if (log_y) {
                if (y <= 0.0) continue;
                y = std::log10(y);
            }
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (!std::isfinite(x_min) || !std::isfinite(y_min)) {
        x_min = 0.0; x_max = 1.0; y_min = 0.0; y_max = 1.0;
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;

    const auto px = [&](scalar_t x) {
        return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr);
    };
    const auto py = [&](scalar_t y) {
        return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb);
    };

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' font-family='sans-serif' font-size='12'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << width / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
        << "</text>\n";
    out << "<line x1='" << ml << "' y1='" << height - mb << "' x2='" << width - mr << "' y2='"
        << height - mb << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << height - mb
        << "' stroke='black'/>\n";

    const int n_ticks = 6;
    for (int i = 0; i < n_ticks; ++i) {
        const scalar_t fx = x_min + (x_max - x_min) * i / (n_ticks - 1);
        const scalar_t fy = y_min + (y_max - y_min) * i / (n_ticks - 1);
        out << "<line x1='" << px(fx) << "' y1='" << height - mb << "' x2='" << px(fx) << "' y2='"
            << height - mb + 5 << "' stroke='black'/>\n";
        out << "<text x='" << px(fx) << "' y='" << height - mb + 18 << "' text-anchor='middle'>"
            << fx << "</text>\n";
        out << "<line x1='" << ml - 5 << "' y1='" << py(fy) << "' x2='" << ml << "' y2='" << py(fy)
            << "' stroke='black'/>\n";
        out << "<text x='" << ml - 8 << "' y='" << py(fy) + 4 << "' text-anchor='end'>"
            << (log_y ? "1e" + std::to_string(fy) : std::to_string(fy).substr(0, 8)) << "</text>\n";
    }
    out << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 12
        << "' text-anchor='middle'>" << x_label << "</text>\n";
    out << "<text x='18' y='" << (mt + height - mb) / 2 << "' text-anchor='middle' transform='rotate(-90 18 "
        << (mt + height - mb) / 2 << ")'>" << y_label << (log_y ? " (log10)" : "") << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kColors[s % (sizeof(kColors) / sizeof(kColors[0]))];
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            scalar_t y = series[s].y[i];
            if (log_y) {
                if (y <= 0.0) continue;
                y = std::log10(y);
            }
            out << px(series[s].x[i]) << "," << py(y) << " ";
        }
        out << "'/>\n";
        out << "<text x='" << width - mr - 150 << "' y='" << mt + 16 * (s + 1) << "' fill='" << color
            << "'>" << series[s].label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace chanest
