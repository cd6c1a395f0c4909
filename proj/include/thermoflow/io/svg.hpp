#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace thermoflow::io {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label = "t";
    std::string y_label;
    int width = 800;
    int height = 500;
};

namespace detail {

inline std::string xml_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string fixed(double v, int digits = 2)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string tick_label(double v)
{
    if (std::abs(v) < 1e-300) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// 1, 2 or 5 times a power of ten, close to range / target.
inline double nice_step(double range, int target)
{
    const double raw = range / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    const double m = r < 1.5 ? 1.0 : (r < 3.0 ? 2.0 : (r < 7.0 ? 5.0 : 10.0));
    return m * mag;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    /// Widens empty or degenerate ranges so that the axis has extent.
    void settle()
    {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        } else if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
            const double pad = std::max(1.0, std::abs(hi)) * 0.5;
            lo -= pad;
            hi += pad;
        }
    }
};

inline constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                        "#9467bd", "#8c564b", "#e377c2", "#17becf"};

} // namespace detail

/// A static line plot: axes with ticks, one polyline per series and a legend.
/// Coordinates are printed with fixed precision so the output is a pure
/// function of the data.
inline std::string render_svg(const PlotSpec& spec, const std::vector<Series>& series)
{
    using detail::fixed;
    const double left = 90.0;
    const double right = 160.0;
    const double top = 40.0;
    const double bottom = 50.0;
    const double W = spec.width;
    const double Hh = spec.height;
    const double pw = W - left - right;
    const double ph = Hh - top - bottom;

    detail::Range xr;
    detail::Range yr;
    for (const auto& s : series) {
        for (double v : s.x) xr.add(v);
        for (double v : s.y) yr.add(v);
    }
    xr.settle();
    yr.settle();

    auto sx = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto sy = [&](double y) { return top + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
           std::to_string(spec.height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
           std::to_string(spec.height) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
           std::to_string(spec.height) + "\" fill=\"white\"/>\n";
    if (!spec.title.empty()) {
        out += "<text x=\"" + fixed(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"16\">" + detail::xml_escape(spec.title) + "</text>\n";
    }

    out += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    out += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(top + ph) + "\" x2=\"" + fixed(left + pw) + "\" y2=\"" +
           fixed(top + ph) + "\"/>\n";
    out += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(top) + "\" x2=\"" + fixed(left) + "\" y2=\"" +
           fixed(top + ph) + "\"/>\n";
    out += "</g>\n";

    out += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    const double xs = detail::nice_step(xr.hi - xr.lo, 8);
    for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi + 1e-9 * xs; t += xs) {
        const double px = sx(t);
        out += "<line x1=\"" + fixed(px) + "\" y1=\"" + fixed(top + ph) + "\" x2=\"" + fixed(px) + "\" y2=\"" +
               fixed(top + ph + 5) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fixed(px) + "\" y=\"" + fixed(top + ph + 18) + "\" text-anchor=\"middle\">" +
               detail::tick_label(std::abs(t) < 1e-9 * xs ? 0.0 : t) + "</text>\n";
    }
    const double ys = detail::nice_step(yr.hi - yr.lo, 6);
    for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi + 1e-9 * ys; t += ys) {
        const double py = sy(t);
        out += "<line x1=\"" + fixed(left - 5) + "\" y1=\"" + fixed(py) + "\" x2=\"" + fixed(left) + "\" y2=\"" +
               fixed(py) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fixed(left - 8) + "\" y=\"" + fixed(py + 4) + "\" text-anchor=\"end\">" +
               detail::tick_label(std::abs(t) < 1e-9 * ys ? 0.0 : t) + "</text>\n";
    }
    out += "<text x=\"" + fixed(left + pw / 2) + "\" y=\"" + fixed(Hh - 10) + "\" text-anchor=\"middle\">" +
           detail::xml_escape(spec.x_label) + "</text>\n";
    if (!spec.y_label.empty()) {
        out += "<text x=\"16\" y=\"" + fixed(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
               fixed(top + ph / 2) + ")\">" + detail::xml_escape(spec.y_label) + "</text>\n";
    }
    out += "</g>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = detail::kPalette[k % detail::kPalette.size()];
        std::string points;
        const std::size_t m = std::min(s.x.size(), s.y.size());
        for (std::size_t i = 0; i < m; ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!points.empty()) points += ' ';
            points += fixed(sx(s.x[i])) + "," + fixed(sy(s.y[i]));
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + points +
               "\"/>\n";
        const double ly = top + 10 + 18.0 * static_cast<double>(k);
        out += "<line x1=\"" + fixed(left + pw + 15) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(left + pw + 40) +
               "\" y2=\"" + fixed(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + fixed(left + pw + 46) + "\" y=\"" + fixed(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + detail::xml_escape(s.label) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace thermoflow::io
