#include "advsamp/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "advsamp/errors.hpp"

namespace advsamp {

namespace {

// Piecewise-linear viridis-like ramp; enough for diagnostics.
struct RgbStop {
    double t;
    int r, g, b;
};

constexpr RgbStop kStops[] = {
    {0.00, 68, 1, 84},   {0.25, 59, 82, 139},  {0.50, 33, 145, 140},
    {0.75, 94, 201, 98}, {1.00, 253, 231, 37},
};

std::string color_at(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const RgbStop* lo = &kStops[0];
    const RgbStop* hi = &kStops[4];
    for (size_t i = 0; i + 1 < std::size(kStops); ++i) {
        if (t >= kStops[i].t && t <= kStops[i + 1].t) {
            lo = &kStops[i];
            hi = &kStops[i + 1];
            break;
        }
    }
    const double f = (hi->t == lo->t) ? 0.0 : (t - lo->t) / (hi->t - lo->t);
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(lo->r + f * (hi->r - lo->r))),
                  static_cast<int>(std::lround(lo->g + f * (hi->g - lo->g))),
                  static_cast<int>(std::lround(lo->b + f * (hi->b - lo->b))));
    return buf;
}

}  // namespace

void write_heatmap_svg(const Eigen::MatrixXd& values,
                       const std::pair<double, double>& x_range,
                       const std::pair<double, double>& y_range,
                       const std::string& title, const std::string& path,
                       const std::vector<std::pair<double, double>>& markers) {
    if (values.rows() == 0 || values.cols() == 0) {
        throw Error::input_error("heatmap: empty value grid");
    }
    const int nx = static_cast<int>(values.rows());
    const int ny = static_cast<int>(values.cols());
    const double vmin = values.minCoeff();
    const double vmax = values.maxCoeff();
    const double span = (vmax > vmin) ? (vmax - vmin) : 1.0;

    const int plot = 480;
    const int margin = 40;
    const int width = plot + 2 * margin;
    const int height = plot + 2 * margin + 20;
    const double cw = static_cast<double>(plot) / nx;
    const double ch = static_cast<double>(plot) / ny;

    std::ofstream out(path);
    if (!out) throw Error::input_error("cannot write SVG file: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" "
        << "font-size=\"14\">" << title << "</text>\n";

    char cell[192];
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const double t = (values(i, j) - vmin) / span;
            // Row j = 0 is the low-y edge; SVG y grows downward.
            const double px = margin + i * cw;
            const double py = margin + 20 + (ny - 1 - j) * ch;
            std::snprintf(cell, sizeof(cell),
                          "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n",
                          px, py, cw + 0.5, ch + 0.5, color_at(t).c_str());
            out << cell;
        }
    }

    const double xspan = x_range.second - x_range.first;
    const double yspan = y_range.second - y_range.first;
    for (const auto& m : markers) {
        const double px = margin + (m.first - x_range.first) / xspan * plot;
        const double py = margin + 20 + (1.0 - (m.second - y_range.first) / yspan) * plot;
        std::snprintf(cell, sizeof(cell),
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"none\" stroke=\"red\" "
                      "stroke-width=\"1.5\"/>\n",
                      px, py);
        out << cell;
    }

    char axis[256];
    std::snprintf(axis, sizeof(axis),
                  "<text x=\"%d\" y=\"%d\" font-family=\"monospace\" font-size=\"11\">[%.3g, %.3g] x "
                  "[%.3g, %.3g], range [%.4g, %.4g]</text>\n",
                  margin, height - 12, x_range.first, x_range.second, y_range.first, y_range.second,
                  vmin, vmax);
    out << axis;
    out << "</svg>\n";
}

}  // namespace advsamp
