#pragma once

#include <string>

namespace mixlab {

// Deterministic SVG assembly: fixed-size canvas, data-space mapping, and the
// few primitives the charts need. All numbers are printed through one
// formatter so identical inputs yield byte-identical files.
class SvgCanvas {
public:
    SvgCanvas(double width, double height);

    // Data-space window for map_x/map_y (y flips: SVG grows downward).
    void set_viewport(double x_min, double x_max, double y_min, double y_max,
                      double margin_left, double margin_top, double margin_right,
                      double margin_bottom);

    double map_x(double x) const;
    double map_y(double y) const;

    void rect(double x, double y, double w, double h, const std::string& fill,
              double opacity = 1.0);
    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0);
    void circle(double cx, double cy, double r, const std::string& fill);
    void polyline(const std::string& points, const std::string& stroke,
                  double stroke_width = 1.5);
    void polygon(const std::string& points, const std::string& fill, double opacity);
    void text(double x, double y, const std::string& content, double size = 11.0,
              const std::string& anchor = "start", const std::string& fill = "#333333");

    double width() const { return width_; }
    double height() const { return height_; }
    double vp_left() const { return ml_; }
    double vp_right() const { return width_ - mr_; }
    double vp_top() const { return mt_; }
    double vp_bottom() const { return height_ - mb_; }

    std::string finish() const;

    static std::string esc(const std::string& s);
    static std::string num(double v);

private:
    double width_, height_;
    double x_min_ = 0, x_max_ = 1, y_min_ = 0, y_max_ = 1;
    double ml_ = 0, mt_ = 0, mr_ = 0, mb_ = 0;
    std::string body_;
};

}  // namespace mixlab
