#include "uplink/cli/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace uplink::cli {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 70.0;
constexpr double kRight = kWidth - 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = kHeight - 50.0;

constexpr std::array<const char*, 12> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78"};

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

/// Roughly five round-valued ticks across [lo, hi].
std::vector<double> make_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (const double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * span;
         t += step) {
        ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    }
    return ticks;
}

}  // namespace

std::string render_svg(const std::vector<ResultRow>& rows) {
    std::vector<Series> series;
    std::string axis_label;
    for (const auto& r : rows) {
        if (!r.throughput) continue;
        axis_label = r.swept_param;
        const std::string label = r.scheme + " / " + r.mode;
        auto it = std::find_if(series.begin(), series.end(),
                               [&](const Series& s) { return s.label == label; });
        if (it == series.end()) {
            series.push_back({label, {}});
            it = series.end() - 1;
        }
        it->points.emplace_back(r.value, *r.throughput);
    }
    if (series.empty()) {
        throw std::invalid_argument("no plottable rows");
    }

    double x_lo = series[0].points[0].first, x_hi = x_lo;
    double y_lo = series[0].points[0].second, y_hi = y_lo;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    // 5% breathing room so lines stay off the frame.
    const double x_pad = (x_hi - x_lo) > 0 ? 0.05 * (x_hi - x_lo) : 0.5;
    const double y_pad = (y_hi - y_lo) > 0 ? 0.05 * (y_hi - y_lo) : 0.5;
    x_lo -= x_pad;
    x_hi += x_pad;
    y_lo -= y_pad;
    y_hi += y_pad;

    const auto px = [&](double x) {
        return kLeft + (x - x_lo) / (x_hi - x_lo) * (kRight - kLeft);
    };
    const auto py = [&](double y) {
        return kBottom - (y - y_lo) / (y_hi - y_lo) * (kBottom - kTop);
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";

    for (const double t : make_ticks(x_lo, x_hi)) {
        const double x = px(t);
        out << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(kBottom)
            << "\" x2=\"" << coord(x) << "\" y2=\"" << coord(kTop)
            << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << coord(x) << "\" y=\"" << coord(kBottom + 18)
            << "\" text-anchor=\"middle\">" << tick(t) << "</text>\n";
    }
    for (const double t : make_ticks(y_lo, y_hi)) {
        const double y = py(t);
        out << "<line x1=\"" << coord(kLeft) << "\" y1=\"" << coord(y)
            << "\" x2=\"" << coord(kRight) << "\" y2=\"" << coord(y)
            << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << coord(kLeft - 8) << "\" y=\"" << coord(y + 4)
            << "\" text-anchor=\"end\">" << tick(t) << "</text>\n";
    }
    out << "<rect x=\"" << coord(kLeft) << "\" y=\"" << coord(kTop) << "\" width=\""
        << coord(kRight - kLeft) << "\" height=\"" << coord(kBottom - kTop)
        << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << coord((kLeft + kRight) / 2) << "\" y=\""
        << coord(kHeight - 12) << "\" text-anchor=\"middle\">" << axis_label
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << coord((kTop + kBottom) / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << coord((kTop + kBottom) / 2) << ")\">throughput (bits/use)</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % kPalette.size()];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"2\" points=\"";
        for (const auto& [x, y] : series[i].points) {
            out << coord(px(x)) << "," << coord(py(y)) << " ";
        }
        out << "\"/>\n";
    }

    const double legend_x = kRight - 210;
    double legend_y = kTop + 16;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % kPalette.size()];
        out << "<line x1=\"" << coord(legend_x) << "\" y1=\"" << coord(legend_y - 4)
            << "\" x2=\"" << coord(legend_x + 26) << "\" y2=\""
            << coord(legend_y - 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << coord(legend_x + 32) << "\" y=\"" << coord(legend_y)
            << "\">" << series[i].label << "</text>\n";
        legend_y += 18;
    }

    out << "</g>\n</svg>\n";
    return out.str();
}

}  // namespace uplink::cli
