#include "mixlab/svg.hpp"

#include <cstdio>
#include <sstream>

#include "mixlab/errors.hpp"
#include "mixlab/util.hpp"

namespace mixlab {

SvgCanvas::SvgCanvas(double width, double height) : width_(width), height_(height) {}

void SvgCanvas::set_viewport(double x_min, double x_max, double y_min, double y_max,
                             double margin_left, double margin_top, double margin_right,
                             double margin_bottom) {
    if (!(x_max > x_min)) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (!(y_max > y_min)) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    x_min_ = x_min;
    x_max_ = x_max;
    y_min_ = y_min;
    y_max_ = y_max;
    ml_ = margin_left;
    mt_ = margin_top;
    mr_ = margin_right;
    mb_ = margin_bottom;
}

double SvgCanvas::map_x(double x) const {
    const double span = width_ - ml_ - mr_;
    return ml_ + (x - x_min_) / (x_max_ - x_min_) * span;
}

double SvgCanvas::map_y(double y) const {
    const double span = height_ - mt_ - mb_;
    return height_ - mb_ - (y - y_min_) / (y_max_ - y_min_) * span;
}

// Pixel coordinates get a fixed two-decimal form; raw data values shown to
// the reader go through fmt_double instead (see num()).
static std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string SvgCanvas::num(double v) { return fmt_double(v); }

std::string SvgCanvas::esc(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& fill,
                     double opacity) {
    body_ += "<rect x=\"" + px(x) + "\" y=\"" + px(y) + "\" width=\"" + px(w) +
             "\" height=\"" + px(h) + "\" fill=\"" + fill + "\"";
    if (opacity != 1.0) body_ += " fill-opacity=\"" + px(opacity) + "\"";
    body_ += "/>\n";
}

void SvgCanvas::line(double x1, double y1, double x2, double y2,
                     const std::string& stroke, double stroke_width) {
    body_ += "<line x1=\"" + px(x1) + "\" y1=\"" + px(y1) + "\" x2=\"" + px(x2) +
             "\" y2=\"" + px(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
             px(stroke_width) + "\"/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& fill) {
    body_ += "<circle cx=\"" + px(cx) + "\" cy=\"" + px(cy) + "\" r=\"" + px(r) +
             "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::polyline(const std::string& points, const std::string& stroke,
                         double stroke_width) {
    body_ += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + stroke +
             "\" stroke-width=\"" + px(stroke_width) + "\"/>\n";
}

void SvgCanvas::polygon(const std::string& points, const std::string& fill,
                        double opacity) {
    body_ += "<polygon points=\"" + points + "\" fill=\"" + fill +
             "\" fill-opacity=\"" + px(opacity) + "\" stroke=\"none\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& content, double size,
                     const std::string& anchor, const std::string& fill) {
    body_ += "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" font-size=\"" + px(size) +
             "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\" fill=\"" +
             fill + "\">" + esc(content) + "</text>\n";
}

std::string SvgCanvas::finish() const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width_)
       << "\" height=\"" << px(height_) << "\" viewBox=\"0 0 " << px(width_) << ' '
       << px(height_) << "\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << px(width_) << "\" height=\""
       << px(height_) << "\" fill=\"#ffffff\"/>\n"
       << body_ << "</svg>\n";
    return os.str();
}

}  // namespace mixlab
