#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

// Self-contained SVG line plots: mean curves with optional shaded bands.
// No dependencies, deterministic output.

namespace newsvendor {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;        // mean
    std::vector<double> band_lo;  // optional, same length as y
    std::vector<double> band_hi;
};

namespace svg_detail {

inline std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline const char* palette(std::size_t i)
{
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
                                   "#bcbd22", "#e377c2"};
    return colors[i % (sizeof colors / sizeof colors[0])];
}

// round the raw tick step to 1/2/5 * 10^k
inline double nice_step(double span, int target_ticks)
{
    if (!(span > 0.0)) return 1.0;
    const double raw = span / std::max(1, target_ticks);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    double step;
    if (norm <= 1.0) step = 1.0;
    else if (norm <= 2.0) step = 2.0;
    else if (norm <= 5.0) step = 5.0;
    else step = 10.0;
    return step * mag;
}

}  // namespace svg_detail

inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           const std::vector<PlotSeries>& series)
{
    using svg_detail::num;
    const double width = 960, height = 600;
    const double ml = 84, mr = 24, mt = 48, mb = 64;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool any = false;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double lo = s.band_lo.empty() ? s.y[i] : s.band_lo[i];
            const double hi = s.band_hi.empty() ? s.y[i] : s.band_hi[i];
            if (!any) {
                x_min = x_max = s.x[i];
                y_min = lo;
                y_max = hi;
                any = true;
            } else {
                x_min = std::min(x_min, s.x[i]);
                x_max = std::max(x_max, s.x[i]);
                y_min = std::min(y_min, lo);
                y_max = std::max(y_max, hi);
            }
        }
    }
    if (!any) {
        x_min = y_min = 0;
        x_max = y_max = 1;
    }
    if (y_min > 0) y_min = 0;  // anchor cost/regret axes at zero
    if (x_max == x_min) x_max = x_min + 1;
    if (y_max == y_min) y_max = y_min + 1;

    auto sx = [&](double v) { return ml + (v - x_min) / (x_max - x_min) * pw; };
    auto sy = [&](double v) { return mt + ph - (v - y_min) / (y_max - y_min) * ph; };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(width / 2) << "\" y=\"28\" font-family=\"sans-serif\" font-size=\"18\""
        << " text-anchor=\"middle\">" << title << "</text>\n";

    // grid and ticks
    const double xstep = svg_detail::nice_step(x_max - x_min, 8);
    const double ystep = svg_detail::nice_step(y_max - y_min, 6);
    out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
    for (double v = std::ceil(x_min / xstep) * xstep; v <= x_max + 1e-9 * xstep; v += xstep) {
        out << "<line x1=\"" << num(sx(v)) << "\" y1=\"" << num(mt) << "\" x2=\"" << num(sx(v))
            << "\" y2=\"" << num(mt + ph) << "\" stroke=\"#e0e0e0\"/>\n";
        out << "<text x=\"" << num(sx(v)) << "\" y=\"" << num(mt + ph + 18)
            << "\" text-anchor=\"middle\">" << num(v) << "</text>\n";
    }
    for (double v = std::ceil(y_min / ystep) * ystep; v <= y_max + 1e-9 * ystep; v += ystep) {
        out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(sy(v)) << "\" x2=\"" << num(ml + pw)
            << "\" y2=\"" << num(sy(v)) << "\" stroke=\"#e0e0e0\"/>\n";
        out << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(sy(v) + 4)
            << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
    }
    out << "</g>\n";

    // bands first so every mean line stays visible
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        if (s.band_lo.empty() || s.band_lo.size() != s.x.size()) continue;
        out << "<polygon fill=\"" << svg_detail::palette(si) << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << num(sx(s.x[i])) << "," << num(sy(s.band_hi[i])) << " ";
        for (std::size_t i = s.x.size(); i-- > 0;)
            out << num(sx(s.x[i])) << "," << num(sy(s.band_lo[i])) << " ";
        out << "\"/>\n";
    }
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        if (s.x.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << svg_detail::palette(si)
            << "\" stroke-width=\"1.6\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << num(sx(s.x[i])) << "," << num(sy(s.y[i])) << " ";
        out << "\"/>\n";
    }

    // axes
    out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(mt + ph) << "\" x2=\"" << num(ml + pw)
        << "\" y2=\"" << num(mt + ph) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(mt) << "\" x2=\"" << num(ml)
        << "\" y2=\"" << num(mt + ph) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(height - 16)
        << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" << x_label
        << "</text>\n";
    out << "<text x=\"20\" y=\"" << num(mt + ph / 2)
        << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << num(mt + ph / 2) << ")\">" << y_label << "</text>\n";

    // legend
    out << "<g font-family=\"sans-serif\" font-size=\"13\">\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const double ly = mt + 10 + 18 * static_cast<double>(si);
        out << "<line x1=\"" << num(ml + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(ml + 40)
            << "\" y2=\"" << num(ly) << "\" stroke=\"" << svg_detail::palette(si)
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << num(ml + 46) << "\" y=\"" << num(ly + 4) << "\">" << series[si].label
            << "</text>\n";
    }
    out << "</g>\n</svg>\n";
}

}  // namespace newsvendor
