#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "extsumm/errors.hpp"

namespace extsumm::svg {

namespace detail {

inline std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string escape_text(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

inline void rect(std::string& out, double x, double y, double w, double h,
                 const std::string& fill, const std::string& extra = "") {
    out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
           "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"" + extra + "/>\n";
}

inline void text(std::string& out, double x, double y, const std::string& s, int size = 12,
                 const std::string& anchor = "middle") {
    out += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
           std::to_string(size) + "\" font-family=\"sans-serif\" text-anchor=\"" + anchor +
           "\">" + escape_text(s) + "</text>\n";
}

inline void line(std::string& out, double x1, double y1, double x2, double y2) {
    out += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
           "\" y2=\"" + num(y2) + "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
}

inline std::string header(double w, double h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" +
           num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n" +
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace detail

struct BarSeries {
    std::string label;
    std::string color;
    std::vector<double> values;
};

// Grouped bar chart; group i is labeled with group_labels[i].
inline std::string render_grouped_bars(const std::vector<std::string>& group_labels,
                                       const std::vector<BarSeries>& series,
                                       const std::string& title,
                                       const std::string& y_label) {
    if (group_labels.empty() || series.empty()) {
        throw std::invalid_argument("bar chart needs at least one group and one series");
    }
    for (const auto& s : series) {
        if (s.values.size() != group_labels.size()) {
            throw LengthMismatch("series '" + s.label + "' length disagrees with group count");
        }
    }
    const double width = 880, height = 420;
    const double left = 70, right = 30, top = 50, bottom = 60;
    const double plot_w = width - left - right, plot_h = height - top - bottom;

    double vmax = 0.0;
    for (const auto& s : series) {
        for (double v : s.values) vmax = std::max(vmax, v);
    }
    if (vmax <= 0.0) vmax = 1.0;

    std::string out = detail::header(width, height);
    detail::text(out, width / 2, 24, title, 16);
    detail::line(out, left, top, left, top + plot_h);
    detail::line(out, left, top + plot_h, left + plot_w, top + plot_h);
    detail::text(out, 18, top + plot_h / 2, y_label, 12, "middle");

    for (int g = 0; g <= 4; ++g) {
        const double frac = g / 4.0;
        const double y = top + plot_h * (1.0 - frac);
        detail::text(out, left - 8, y + 4, detail::num(vmax * frac), 10, "end");
        if (g > 0) {
            out += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(y) +
                   "\" x2=\"" + detail::num(left + plot_w) + "\" y2=\"" + detail::num(y) +
                   "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        }
    }

    const double group_w = plot_w / static_cast<double>(group_labels.size());
    const double bar_w = group_w * 0.8 / static_cast<double>(series.size());
    for (std::size_t g = 0; g < group_labels.size(); ++g) {
        const double gx = left + group_w * static_cast<double>(g) + group_w * 0.1;
        for (std::size_t s = 0; s < series.size(); ++s) {
            const double v = series[s].values[g];
            const double h = plot_h * (v / vmax);
            detail::rect(out, gx + bar_w * static_cast<double>(s), top + plot_h - h, bar_w, h,
                         series[s].color);
        }
        detail::text(out, gx + group_w * 0.4, top + plot_h + 16, group_labels[g], 10);
    }

    double lx = left;
    for (const auto& s : series) {
        detail::rect(out, lx, height - 24, 12, 12, s.color);
        detail::text(out, lx + 16, height - 14, s.label, 11, "start");
        lx += 22 + 8.0 * static_cast<double>(s.label.size());
    }
    out += "</svg>\n";
    return out;
}

struct HeatCell {
    int position = 0;
    std::string section;
    double prob = 0.0;
    bool is_selected = false;
    bool is_oracle = false;
};

// One row of probability-shaded cells; oracle sentences get a star, selected
// ones a heavy border. Mirrors the exported heatmap CSV.
inline std::string render_heatmap(const std::vector<HeatCell>& cells, const std::string& title) {
    const double cell_w = 34, cell_h = 34, gap = 4;
    const double left = 30, top = 70;
    const std::size_t n = std::max<std::size_t>(cells.size(), 1);
    const double width = left * 2 + static_cast<double>(n) * (cell_w + gap);
    const double height = top + cell_h + 70;

    std::string out = detail::header(width, height);
    detail::text(out, width / 2, 24, title, 15);
    detail::text(out, width / 2, 44, "* = oracle sentence, heavy border = selected", 11);

    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        const double x = left + static_cast<double>(i) * (cell_w + gap);
        const int shade = static_cast<int>(std::lround(std::clamp(c.prob, 0.0, 1.0) * 200.0));
        char color[16];
        std::snprintf(color, sizeof(color), "#ff%02x%02x", 235 - shade, 235 - shade);
        const std::string border = c.is_selected
                                       ? " stroke=\"black\" stroke-width=\"3\""
                                       : " stroke=\"#999\" stroke-width=\"1\"";
        detail::rect(out, x, top, cell_w, cell_h, color, border);
        if (c.is_oracle) detail::text(out, x + cell_w / 2, top - 6, "*", 16);
        detail::text(out, x + cell_w / 2, top + cell_h + 14, std::to_string(c.position), 10);
        std::string sec = c.section.substr(0, 4);
        detail::text(out, x + cell_w / 2, top + cell_h + 28, sec, 9);
        char pbuf[16];
        std::snprintf(pbuf, sizeof(pbuf), "%.2f", c.prob);
        detail::text(out, x + cell_w / 2, top + cell_h / 2 + 4, pbuf, 10);
    }
    out += "</svg>\n";
    return out;
}

}  // namespace extsumm::svg
