#include "roadsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "roadsim/csv.hpp"

namespace roadsim::svg {

namespace {

struct AxisRange {
    double lo = 0.0;
    double hi = 1.0;

    void take(double v) {
        if (!std::isfinite(v)) {
            return;
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

AxisRange make_range() {
    AxisRange r;
    r.lo = std::numeric_limits<double>::infinity();
    r.hi = -std::numeric_limits<double>::infinity();
    return r;
}

void finalize(AxisRange& r) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) {
        r.lo = 0.0;
        r.hi = 1.0;
    }
    if (r.hi == r.lo) {
        r.hi = r.lo + 1.0;
    }
    const double pad = 0.05 * (r.hi - r.lo);
    r.lo -= pad;
    r.hi += pad;
}

std::string num(double v) { return csv::format_double(v); }

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace

std::string line_chart(const ChartSpec& spec, const std::vector<Series>& series) {
    const double ml = 70, mr = spec.y2_label.empty() ? 30 : 70, mt = 50, mb = 60;
    const double pw = spec.width - ml - mr;
    const double ph = spec.height - mt - mb;

    AxisRange xr = make_range();
    AxisRange yr = make_range();
    AxisRange y2r = make_range();
    for (const Series& s : series) {
        for (const auto& [x, y] : s.points) {
            xr.take(x);
            (s.second_axis ? y2r : yr).take(y);
        }
    }
    finalize(xr);
    finalize(yr);
    finalize(y2r);

    const auto px = [&](double x) { return ml + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    const auto py = [&](double y, const AxisRange& r) {
        return mt + ph - (y - r.lo) / (r.hi - r.lo) * ph;
    };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) +
           "\" height=\"" + std::to_string(spec.height) + "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(spec.width / 2.0) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-size=\"16\">" + spec.title + "</text>\n";

    // Axes and ticks.
    out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) + "\" y2=\"" +
           num(mt + ph) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" + num(ml + pw) +
           "\" y2=\"" + num(mt + ph) + "\" stroke=\"black\"/>\n";
    if (!spec.y2_label.empty()) {
        out += "<line x1=\"" + num(ml + pw) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml + pw) +
               "\" y2=\"" + num(mt + ph) + "\" stroke=\"black\"/>\n";
    }
    const int ticks = 5;
    for (int t = 0; t <= ticks; ++t) {
        const double fx = xr.lo + (xr.hi - xr.lo) * t / ticks;
        out += "<line x1=\"" + num(px(fx)) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" +
               num(px(fx)) + "\" y2=\"" + num(mt + ph + 5) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(px(fx)) + "\" y=\"" + num(mt + ph + 20) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + tick_label(fx) + "</text>\n";
        const double fy = yr.lo + (yr.hi - yr.lo) * t / ticks;
        out += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(py(fy, yr) + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">" + tick_label(fy) + "</text>\n";
        if (!spec.y2_label.empty()) {
            const double fy2 = y2r.lo + (y2r.hi - y2r.lo) * t / ticks;
            out += "<text x=\"" + num(ml + pw + 8) + "\" y=\"" + num(py(fy2, y2r) + 4) +
                   "\" text-anchor=\"start\" font-size=\"11\">" + tick_label(fy2) + "</text>\n";
        }
    }
    out += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(spec.height - 14) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + spec.x_label + "</text>\n";
    out += "<text x=\"18\" y=\"" + num(mt + ph / 2) + "\" text-anchor=\"middle\" font-size=\"13\" "
           "transform=\"rotate(-90 18 " + num(mt + ph / 2) + ")\">" + spec.y_label + "</text>\n";
    if (!spec.y2_label.empty()) {
        out += "<text x=\"" + num(spec.width - 16.0) + "\" y=\"" + num(mt + ph / 2) +
               "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(90 " +
               num(spec.width - 16.0) + " " + num(mt + ph / 2) + ")\">" + spec.y2_label +
               "</text>\n";
    }

    for (const Series& s : series) {
        const AxisRange& r = s.second_axis ? y2r : yr;
        std::string points;
        const auto flush = [&]() {
            if (!points.empty()) {
                out += "<polyline fill=\"none\" stroke=\"" + s.color +
                       "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
                points.clear();
            }
        };
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) {
                flush();
                continue;
            }
            points += num(px(x)) + "," + num(py(y, r)) + " ";
            out += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y, r)) +
                   "\" r=\"2.5\" fill=\"" + s.color + "\"/>\n";
        }
        flush();
    }

    double ly = mt + 8;
    for (const Series& s : series) {
        out += "<line x1=\"" + num(ml + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(ml + 36) +
               "\" y2=\"" + num(ly) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(ml + 42) + "\" y=\"" + num(ly + 4) + "\" font-size=\"12\">" +
               s.label + "</text>\n";
        ly += 18;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace roadsim::svg
