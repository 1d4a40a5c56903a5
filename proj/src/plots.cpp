#include "mixlab/plots.hpp"

#include <algorithm>
#include <cmath>

#include "mixlab/errors.hpp"
#include "mixlab/svg.hpp"

namespace mixlab {

namespace {

constexpr const char* kImproved = "#1f77b4";  // blue
constexpr const char* kDegraded = "#d62728";  // red
constexpr const char* kNeutral = "#7f7f7f";

struct Range {
    double lo = 0.0, hi = 0.0;
};

Range value_range(const std::vector<double>& v, bool include_zero = false) {
    Range r{v.front(), v.front()};
    for (double x : v) {
        r.lo = std::min(r.lo, x);
        r.hi = std::max(r.hi, x);
    }
    if (include_zero) {
        r.lo = std::min(r.lo, 0.0);
        r.hi = std::max(r.hi, 0.0);
    }
    return r;
}

// Axis endpoint labels carry actual data values, so every number in the SVG
// traces back to a CSV cell.
void label_y_extremes(SvgCanvas& svg, double lo, double hi) {
    svg.text(svg.vp_left() - 4, svg.map_y(hi) + 4, SvgCanvas::num(hi), 10, "end");
    svg.text(svg.vp_left() - 4, svg.map_y(lo) + 4, SvgCanvas::num(lo), 10, "end");
}

void label_x_extremes(SvgCanvas& svg, double lo, double hi) {
    svg.text(svg.map_x(lo), svg.vp_bottom() + 14, SvgCanvas::num(lo), 10, "middle");
    svg.text(svg.map_x(hi), svg.vp_bottom() + 14, SvgCanvas::num(hi), 10, "middle");
}

void frame(SvgCanvas& svg) {
    svg.line(svg.vp_left(), svg.vp_bottom(), svg.vp_right(), svg.vp_bottom(), "#333333");
    svg.line(svg.vp_left(), svg.vp_top(), svg.vp_left(), svg.vp_bottom(), "#333333");
}

}  // namespace

std::string render_delta_bar_chart(const CsvTable& per_class, const std::string& title) {
    const std::vector<double> delta = per_class.column_values("delta_pp");
    if (delta.empty()) throw ValidationError("bar chart needs at least one class");
    std::vector<size_t> order(delta.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return delta[a] > delta[b]; });

    const Range r = value_range(delta, /*include_zero=*/true);
    SvgCanvas svg(720, 360);
    svg.set_viewport(0, static_cast<double>(delta.size()), r.lo, r.hi, 60, 36, 20, 40);
    svg.text(svg.width() / 2, 20, title, 13, "middle");
    frame(svg);
    label_y_extremes(svg, r.lo, r.hi);
    svg.line(svg.vp_left(), svg.map_y(0.0), svg.vp_right(), svg.map_y(0.0), "#999999");

    const double slot = (svg.vp_right() - svg.vp_left()) / static_cast<double>(delta.size());
    const double bar_w = std::max(1.0, slot * 0.8);
    for (size_t rank = 0; rank < order.size(); ++rank) {
        const double d = delta[order[rank]];
        const double x = svg.vp_left() + slot * static_cast<double>(rank) +
                         (slot - bar_w) / 2.0;
        const double y0 = svg.map_y(0.0), y1 = svg.map_y(d);
        const char* color = d > 0.0 ? kImproved : (d < 0.0 ? kDegraded : kNeutral);
        svg.rect(x, std::min(y0, y1), bar_w, std::max(1.0, std::abs(y1 - y0)), color);
    }
    // Annotate the best and worst class with their values.
    svg.text(svg.vp_left() + 2, svg.map_y(delta[order.front()]) - 4,
             SvgCanvas::num(delta[order.front()]), 10, "start", kImproved);
    svg.text(svg.vp_right() - 2, svg.map_y(delta[order.back()]) + 12,
             SvgCanvas::num(delta[order.back()]), 10, "end", kDegraded);
    svg.text(svg.width() / 2, svg.height() - 8, "classes, sorted by recall change (pp)",
             11, "middle");
    return svg.finish();
}

std::string render_confidence_scatter(const CsvTable& per_class, const std::string& title) {
    const std::vector<double> dconf = per_class.column_values("confidence_delta");
    const std::vector<double> delta = per_class.column_values("delta_pp");
    const size_t group_col = per_class.col("group");

    Range rx = value_range(dconf, true);
    Range ry = value_range(delta, true);
    SvgCanvas svg(480, 420);
    svg.set_viewport(rx.lo, rx.hi, ry.lo, ry.hi, 60, 36, 20, 46);
    svg.text(svg.width() / 2, 20, title, 13, "middle");
    frame(svg);
    label_y_extremes(svg, ry.lo, ry.hi);
    label_x_extremes(svg, rx.lo, rx.hi);
    svg.line(svg.vp_left(), svg.map_y(0.0), svg.vp_right(), svg.map_y(0.0), "#cccccc");
    svg.line(svg.map_x(0.0), svg.vp_top(), svg.map_x(0.0), svg.vp_bottom(), "#cccccc");

    for (size_t i = 0; i < dconf.size(); ++i) {
        const std::string& group = per_class.rows[i][group_col];
        const char* color = group == "improved" ? kImproved
                            : group == "degraded" ? kDegraded
                                                  : kNeutral;
        svg.circle(svg.map_x(dconf[i]), svg.map_y(delta[i]), 3.2, color);
    }
    svg.text(svg.width() / 2, svg.height() - 8, "confidence change", 11, "middle");
    svg.text(14, svg.height() / 2, "recall change (pp)", 11, "middle");
    return svg.finish();
}

std::string render_recall_band(const CsvTable& band, const std::string& title) {
    const std::vector<double> mean = band.column_values("delta_mean");
    const std::vector<double> lo = band.column_values("delta_min");
    const std::vector<double> hi = band.column_values("delta_max");
    if (mean.empty()) throw ValidationError("band chart needs at least one class");

    Range ry = value_range(lo, true);
    const Range rhi = value_range(hi, true);
    ry.lo = std::min(ry.lo, rhi.lo);
    ry.hi = std::max(ry.hi, rhi.hi);

    SvgCanvas svg(720, 360);
    svg.set_viewport(0, static_cast<double>(mean.size() - 1), ry.lo, ry.hi, 60, 36, 20, 40);
    svg.text(svg.width() / 2, 20, title, 13, "middle");
    frame(svg);
    label_y_extremes(svg, ry.lo, ry.hi);
    svg.line(svg.vp_left(), svg.map_y(0.0), svg.vp_right(), svg.map_y(0.0), "#999999");

    auto pt = [&](double x, double y) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", svg.map_x(x), svg.map_y(y));
        return std::string(buf);
    };
    std::string poly;
    for (size_t i = 0; i < mean.size(); ++i) poly += pt(static_cast<double>(i), hi[i]);
    for (size_t i = mean.size(); i-- > 0;) poly += pt(static_cast<double>(i), lo[i]);
    svg.polygon(poly, kImproved, 0.25);

    std::string line;
    for (size_t i = 0; i < mean.size(); ++i) line += pt(static_cast<double>(i), mean[i]);
    svg.polyline(line, kImproved);
    svg.text(svg.width() / 2, svg.height() - 8,
             "classes, sorted by mean recall change; band = min/max across seeds", 11,
             "middle");
    return svg.finish();
}

std::string render_sweep_panels(const CsvTable& sweep, const std::string& title) {
    const std::vector<double> rate = sweep.column_values("rate");
    if (rate.size() < 1) throw ValidationError("sweep chart needs grid points");
    struct Panel {
        const char* value_col;
        const char* band_col;  // nullptr: no shading
        const char* caption;
    };
    const Panel panels[3] = {
        {"acc_mean", "acc_std", "average accuracy"},
        {"n_dc", nullptr, "degraded classes"},
        {"mean_delta_dc", "std_delta_dc", "mean recall change of degraded (pp)"},
    };

    SvgCanvas svg(960, 320);
    svg.text(svg.width() / 2, 18, title, 13, "middle");
    const double panel_w = 300, gap = 20, left0 = 60, top = 40, bottom = 48;

    for (int p = 0; p < 3; ++p) {
        std::vector<double> value = sweep.column_values(panels[p].value_col);
        std::vector<double> band(value.size(), 0.0);
        if (panels[p].band_col) band = sweep.column_values(panels[p].band_col);

        Range ry{value[0] - band[0], value[0] + band[0]};
        for (size_t i = 0; i < value.size(); ++i) {
            ry.lo = std::min(ry.lo, value[i] - band[i]);
            ry.hi = std::max(ry.hi, value[i] + band[i]);
        }
        const Range rx = value_range(rate);
        const double x0 = left0 + p * (panel_w + gap);
        svg.set_viewport(rx.lo, rx.hi, ry.lo, ry.hi, x0, top,
                         svg.width() - x0 - panel_w, bottom);
        svg.line(svg.vp_left(), svg.vp_bottom(), svg.vp_left() + panel_w,
                 svg.vp_bottom(), "#333333");
        svg.line(svg.vp_left(), svg.vp_top(), svg.vp_left(), svg.vp_bottom(), "#333333");
        label_y_extremes(svg, ry.lo, ry.hi);
        label_x_extremes(svg, rx.lo, rx.hi);

        auto pt = [&](double x, double y) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", svg.map_x(x), svg.map_y(y));
            return std::string(buf);
        };
        if (panels[p].band_col) {
            std::string poly;
            for (size_t i = 0; i < rate.size(); ++i) poly += pt(rate[i], value[i] + band[i]);
            for (size_t i = rate.size(); i-- > 0;) poly += pt(rate[i], value[i] - band[i]);
            svg.polygon(poly, kImproved, 0.2);
        }
        std::string line;
        for (size_t i = 0; i < rate.size(); ++i) line += pt(rate[i], value[i]);
        svg.polyline(line, kImproved);
        for (size_t i = 0; i < rate.size(); ++i) {
            svg.circle(svg.map_x(rate[i]), svg.map_y(value[i]), 2.6, kImproved);
        }
        svg.text(x0 + panel_w / 2, svg.height() - 10, panels[p].caption, 11, "middle");
    }
    return svg.finish();
}

std::string render_label_info(const CsvTable& curves, const std::string& title) {
    const std::vector<double> strength = curves.column_values("strength");
    if (curves.header.size() < 2) throw ValidationError("label-info chart needs curves");

    SvgCanvas svg(560, 400);
    const Range rx = value_range(strength);
    svg.set_viewport(rx.lo, rx.hi, 0.0, 1.0, 60, 36, 20, 46);
    svg.text(svg.width() / 2, 20, title, 13, "middle");
    frame(svg);
    label_x_extremes(svg, rx.lo, rx.hi);
    svg.text(svg.vp_left() - 4, svg.map_y(1.0) + 4, "1", 10, "end");
    svg.text(svg.vp_left() - 4, svg.map_y(0.0) + 4, "0", 10, "end");
    svg.line(svg.vp_left(), svg.map_y(0.5), svg.vp_right(), svg.map_y(0.5), "#cccccc");

    for (size_t c = 1; c < curves.header.size(); ++c) {
        const std::string& name = curves.header[c];
        const bool fragile = name.find("fragile") != std::string::npos ||
                             name.find("degraded") != std::string::npos;
        std::string line;
        for (size_t i = 0; i < strength.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", svg.map_x(strength[i]),
                          svg.map_y(curves.num(i, c)));
            line += buf;
        }
        svg.polyline(line, fragile ? kDegraded : kImproved);
        svg.text(svg.vp_right() - 4,
                 svg.map_y(curves.num(strength.size() - 1, c)) - 3, name, 9, "end",
                 fragile ? kDegraded : kImproved);
    }
    svg.text(svg.width() / 2, svg.height() - 8, "mix strength (1 - lambda)", 11, "middle");
    svg.text(14, svg.height() / 2, "P(class)", 11, "middle");
    return svg.finish();
}

}  // namespace mixlab
