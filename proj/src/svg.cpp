#include "cfarey/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cfarey::svg {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string escape_xml(const std::string& s) {
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

std::ofstream open_svg(const std::string& path, int w, int h, const std::string& meta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    if (!meta.empty()) out << "<!--\n" << escape_xml(meta) << "\n-->\n";
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    return out;
}

// blue (s = 0) to red (s = 1)
std::string ramp(double s) {
    s = std::clamp(s, 0.0, 1.0);
    const int r = static_cast<int>(30 + 225 * s);
    const int g = static_cast<int>(60 + 40 * (1 - s));
    const int b = static_cast<int>(255 - 225 * s);
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

struct Frame {
    double x0, x1, y0, y1; // data range
    int left, top, w, h;   // pixel box
    double px(double x) const { return left + (x - x0) / (x1 - x0) * w; }
    double py(double y) const { return top + (y1 - y) / (y1 - y0) * h; }
};

void draw_axes(std::ofstream& out, const Frame& f, const std::string& xLabel,
               const std::string& yLabel) {
    out << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.w
        << "\" height=\"" << f.h << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double x = f.x0 + (f.x1 - f.x0) * i / 5.0;
        const double y = f.y0 + (f.y1 - f.y0) * i / 5.0;
        const double pxv = f.px(x), pyv = f.py(y);
        out << "<line x1=\"" << fmt(pxv) << "\" y1=\"" << f.top + f.h << "\" x2=\"" << fmt(pxv)
            << "\" y2=\"" << f.top + f.h + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << fmt(pxv) << "\" y=\"" << f.top + f.h + 18
            << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(x) << "</text>\n"
            << "<line x1=\"" << f.left - 5 << "\" y1=\"" << fmt(pyv) << "\" x2=\"" << f.left
            << "\" y2=\"" << fmt(pyv) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << f.left - 8 << "\" y=\"" << fmt(pyv + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
    }
    out << "<text x=\"" << f.left + f.w / 2 << "\" y=\"" << f.top + f.h + 36
        << "\" font-size=\"13\" text-anchor=\"middle\">" << escape_xml(xLabel) << "</text>\n";
    out << "<text x=\"16\" y=\"" << f.top + f.h / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << f.top + f.h / 2 << ")\">" << escape_xml(yLabel) << "</text>\n";
}

void title_text(std::ofstream& out, int width, const std::string& title) {
    out << "<text x=\"" << width / 2
        << "\" y=\"20\" font-size=\"15\" text-anchor=\"middle\">" << escape_xml(title)
        << "</text>\n";
}

} // namespace

void scatter(const std::string& path, const FareySet& set, const std::string& title,
             const std::string& metaComment) {
    const double imw = set.ring.omega.imag();
    const double rew = set.ring.omega.real();
    const int W = 840;
    const int margin = 40;
    const int plotW = W - 2 * margin;
    const int plotH = static_cast<int>(plotW * imw / (1.0 + std::abs(rew)));
    const int H = plotH + 2 * margin + 20;

    std::ofstream out = open_svg(path, W, H, metaComment);
    title_text(out, W, title);

    const double xSpan = 1.0 + std::abs(rew);
    const auto px = [&](double x) { return margin + (x + std::max(0.0, -rew)) / xSpan * plotW; };
    const auto py = [&](double y) { return margin + 20 + (imw - y) / imw * plotH; };

    // fundamental parallelogram 0, 1, 1+omega, omega
    out << "<polygon points=\"" << fmt(px(0)) << "," << fmt(py(0)) << " " << fmt(px(1)) << ","
        << fmt(py(0)) << " " << fmt(px(1 + rew)) << "," << fmt(py(imw)) << " " << fmt(px(rew))
        << "," << fmt(py(imw)) << "\" fill=\"none\" stroke=\"black\"/>\n";

    const double hMax = std::sqrt(static_cast<double>(set.normBound));
    for (const FareyFraction& f : set.fractions) {
        const double s = std::sqrt(static_cast<double>(f.heightSq)) / hMax;
        out << "<circle cx=\"" << fmt(px(f.point.cart.real())) << "\" cy=\""
            << fmt(py(f.point.cart.imag())) << "\" r=\"1.4\" fill=\"" << ramp(s) << "\"/>\n";
    }
    out << "</svg>\n";
}

void histogram(const std::string& path, const std::vector<double>& edges,
               const std::vector<double>& density, const std::string& title,
               const std::string& xLabel, const std::string& metaComment) {
    if (edges.size() != density.size() + 1)
        throw std::invalid_argument("histogram: edges must have density.size()+1 entries");
    const int W = 840, H = 560, margin = 60;
    Frame f{edges.front(),
            edges.back(),
            0.0,
            std::max(1e-12, *std::max_element(density.begin(), density.end())) * 1.05,
            margin,
            40,
            W - 2 * margin,
            H - 40 - 60};

    std::ofstream out = open_svg(path, W, H, metaComment);
    title_text(out, W, title);
    for (std::size_t b = 0; b < density.size(); ++b) {
        if (density[b] <= 0) continue;
        const double x0 = f.px(edges[b]), x1 = f.px(edges[b + 1]);
        const double y = f.py(density[b]);
        out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y) << "\" width=\""
            << fmt(std::max(0.5, x1 - x0)) << "\" height=\"" << fmt(f.py(0) - y)
            << "\" fill=\"#4878cf\" stroke=\"none\"/>\n";
    }
    draw_axes(out, f, xLabel, "density");
    out << "</svg>\n";
}

void lines(const std::string& path, const std::vector<Series>& series,
           const std::string& title, const std::string& xLabel, const std::string& yLabel,
           const std::string& metaComment) {
    double x0 = HUGE_VAL, x1 = -HUGE_VAL, y0 = HUGE_VAL, y1 = -HUGE_VAL;
    for (const Series& s : series) {
        for (double x : s.x) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
        }
        for (double y : s.y) {
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (!(x1 > x0)) x1 = x0 + 1;
    if (!(y1 > y0)) y1 = y0 + 1;
    const double pad = 0.04 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    const int W = 840, H = 560, margin = 60;
    Frame f{x0, x1, y0, y1, margin, 40, W - 2 * margin, H - 40 - 60};

    std::ofstream out = open_svg(path, W, H, metaComment);
    title_text(out, W, title);
    int legendY = 50;
    for (const Series& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << fmt(f.px(s.x[i])) << "," << fmt(f.py(s.y[i])) << " ";
        out << "\"/>\n";
        out << "<line x1=\"" << W - 200 << "\" y1=\"" << legendY << "\" x2=\"" << W - 170
            << "\" y2=\"" << legendY << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << W - 165 << "\" y=\"" << legendY + 4 << "\" font-size=\"12\">"
            << escape_xml(s.name) << "</text>\n";
        legendY += 18;
    }
    draw_axes(out, f, xLabel, yLabel);
    out << "</svg>\n";
}

} // namespace cfarey::svg
