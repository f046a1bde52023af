#include "rgp/svg.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rgp/error.hpp"

namespace rgp::svg {

namespace {

constexpr double MARGIN = 56.0;
constexpr double PLOT = 400.0;
constexpr double SIZE = PLOT + 2 * MARGIN;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

double px(double unit_x) { return MARGIN + unit_x * PLOT; }
double py(double unit_y) { return MARGIN + (1.0 - unit_y) * PLOT; }

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

} // namespace

std::string render_roc(const metrics::RocCurve& curve, const std::string& title) {
    if (curve.points.size() < 2) fail("render_roc: curve has fewer than 2 points");

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << SIZE
        << "\" height=\"" << SIZE << "\" viewBox=\"0 0 " << SIZE << " " << SIZE
        << "\">\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"" << SIZE << "\" height=\"" << SIZE
        << "\" fill=\"white\"/>\n";
    out << "  <rect x=\"" << fmt(MARGIN) << "\" y=\"" << fmt(MARGIN)
        << "\" width=\"" << fmt(PLOT) << "\" height=\"" << fmt(PLOT)
        << "\" fill=\"none\" stroke=\"#444\"/>\n";

    // chance diagonal
    out << "  <line x1=\"" << fmt(px(0)) << "\" y1=\"" << fmt(py(0)) << "\" x2=\""
        << fmt(px(1)) << "\" y2=\"" << fmt(py(1))
        << "\" stroke=\"#bbb\" stroke-dasharray=\"6,4\"/>\n";

    // ticks every 0.25
    for (int i = 0; i <= 4; ++i) {
        double u = i / 4.0;
        out << "  <line x1=\"" << fmt(px(u)) << "\" y1=\"" << fmt(MARGIN + PLOT)
            << "\" x2=\"" << fmt(px(u)) << "\" y2=\"" << fmt(MARGIN + PLOT + 6)
            << "\" stroke=\"#444\"/>\n";
        out << "  <text x=\"" << fmt(px(u)) << "\" y=\"" << fmt(MARGIN + PLOT + 20)
            << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt(u)
            << "</text>\n";
        out << "  <line x1=\"" << fmt(MARGIN - 6) << "\" y1=\"" << fmt(py(u))
            << "\" x2=\"" << fmt(MARGIN) << "\" y2=\"" << fmt(py(u))
            << "\" stroke=\"#444\"/>\n";
        out << "  <text x=\"" << fmt(MARGIN - 10) << "\" y=\"" << fmt(py(u) + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << fmt(u) << "</text>\n";
    }

    out << "  <polyline fill=\"none\" stroke=\"#1565c0\" stroke-width=\"2\" "
           "points=\"";
    for (size_t i = 0; i < curve.points.size(); ++i) {
        if (i) out << ' ';
        out << fmt(px(curve.points[i].fpr)) << ',' << fmt(py(curve.points[i].tpr));
    }
    out << "\"/>\n";

    out << "  <text x=\"" << fmt(SIZE / 2) << "\" y=\"" << fmt(MARGIN - 20)
        << "\" font-size=\"14\" text-anchor=\"middle\">" << escape(title)
        << "</text>\n";
    out << "  <text x=\"" << fmt(SIZE / 2) << "\" y=\"" << fmt(SIZE - 12)
        << "\" font-size=\"12\" text-anchor=\"middle\">false positive "
           "rate</text>\n";
    out << "  <text x=\"16\" y=\"" << fmt(SIZE / 2)
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << fmt(SIZE / 2) << ")\">true positive rate</text>\n";
    out << "</svg>\n";
    return out.str();
}

void write_roc(const metrics::RocCurve& curve, const std::string& title,
               const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write ", path);
    out << render_roc(curve, title);
    if (!out) fail("failed writing ", path);
}

} // namespace rgp::svg
