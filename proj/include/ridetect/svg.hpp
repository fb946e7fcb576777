#pragma once

#include <span>
#include <sstream>
#include <string>
#include <utility>

#include "ridetect/numfmt.hpp"

namespace ridetect {

/// Minimal SVG assembly: fixed canvas, stroke/fill colors given as CSS
/// strings, coordinates written with shortest round-trip formatting so the
/// output is reproducible byte for byte.
class SvgDocument {
public:
    SvgDocument(double width, double height) : width_(width), height_(height) {}

    double width() const { return width_; }
    double height() const { return height_; }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0) {
        body_ << "<line x1=\"" << format_double(x1) << "\" y1=\"" << format_double(y1)
              << "\" x2=\"" << format_double(x2) << "\" y2=\"" << format_double(y2)
              << "\" stroke=\"" << stroke << "\" stroke-width=\""
              << format_double(stroke_width) << "\"/>\n";
    }

    void polyline(std::span<const std::pair<double, double>> points, const std::string& stroke,
                  double stroke_width = 1.0) {
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
              << format_double(stroke_width) << "\" points=\"";
        bool first = true;
        for (const auto& [x, y] : points) {
            if (!first) body_ << ' ';
            first = false;
            body_ << format_double(x) << ',' << format_double(y);
        }
        body_ << "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill) {
        body_ << "<circle cx=\"" << format_double(cx) << "\" cy=\"" << format_double(cy)
              << "\" r=\"" << format_double(r) << "\" fill=\"" << fill << "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill) {
        body_ << "<rect x=\"" << format_double(x) << "\" y=\"" << format_double(y)
              << "\" width=\"" << format_double(w) << "\" height=\"" << format_double(h)
              << "\" fill=\"" << fill << "\"/>\n";
    }

    void text(double x, double y, const std::string& content, double font_size = 12.0,
              const std::string& anchor = "start") {
        body_ << "<text x=\"" << format_double(x) << "\" y=\"" << format_double(y)
              << "\" font-size=\"" << format_double(font_size)
              << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << content
              << "</text>\n";
    }

    /// Raw markup escape hatch for comments and headers.
    void append(const std::string& markup) { body_ << markup; }

    std::string render() const {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(width_)
            << "\" height=\"" << format_double(height_) << "\" viewBox=\"0 0 "
            << format_double(width_) << ' ' << format_double(height_) << "\">\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

private:
    double width_;
    double height_;
    std::ostringstream body_;
};

}  // namespace ridetect
