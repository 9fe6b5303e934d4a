#ifndef GTQW_TOOLS_SVG_PLOT_HPP
#define GTQW_TOOLS_SVG_PLOT_HPP

// Static SVG line charts. Output depends only on the data, so reruns are
// byte-identical.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace gtqw::cli {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
};

namespace svg_detail {

inline std::string num(double v, const char* fmt = "%.2f") {
    char buf[32];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
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

// Ticks at 1, 2 or 5 times a power of ten, about `target` of them.
inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
    if (!(hi > lo)) {
        return {lo};
    }
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
        ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return ticks;
}

}  // namespace svg_detail

inline std::string render_line_chart(const PlotSpec& spec, const std::vector<Series>& series) {
    using namespace svg_detail;
    constexpr double W = 720, H = 440, L = 80, R = 170, T = 40, Bm = 60;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

    auto ty = [&](double y) { return spec.log_y ? std::log10(y) : y; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (spec.log_y && !(s.y[i] > 0.0)) {
                continue;
            }
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!std::isfinite(x0)) {
        x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    if (spec.log_y) {
        y0 = std::floor(y0);
        y1 = std::ceil(y1);
    } else {
        const double pad = 0.05 * (y1 - y0);
        y0 -= pad;
        y1 += pad;
    }
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - Bm - (y - y0) / (y1 - y0) * (H - T - Bm); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num((W - R + L) / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << escape(spec.title) << "</text>\n";

    // Axes and ticks.
    os << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << (W - L - R)
       << "\" height=\"" << (H - T - Bm) << "\"/></g>\n";
    os << "<g font-size=\"11\">\n";
    for (double t : nice_ticks(x0, x1)) {
        os << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(H - Bm) << "\" x2=\"" << num(px(t)) << "\" y2=\""
           << num(H - Bm + 5) << "\" stroke=\"black\"/>";
        os << "<text x=\"" << num(px(t)) << "\" y=\"" << num(H - Bm + 18) << "\" text-anchor=\"middle\">"
           << num(t, "%g") << "</text>\n";
    }
    std::vector<double> yt = spec.log_y ? std::vector<double>{} : nice_ticks(y0, y1);
    if (spec.log_y) {
        const int stride = std::max(1, static_cast<int>(std::ceil((y1 - y0) / 8.0)));
        for (double e = y0; e <= y1 + 1e-9; e += stride) yt.push_back(e);
    }
    for (double t : yt) {
        os << "<line x1=\"" << num(L - 5) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(L) << "\" y2=\""
           << num(py(t)) << "\" stroke=\"black\"/>";
        os << "<text x=\"" << num(L - 8) << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">"
           << (spec.log_y ? "1e" + num(t, "%.0f") : num(t, "%g")) << "</text>\n";
    }
    os << "</g>\n";
    os << "<text x=\"" << num((W - R + L) / 2) << "\" y=\"" << num(H - 18) << "\" text-anchor=\"middle\">"
       << escape(spec.x_label) << "</text>\n";
    os << "<text x=\"18\" y=\"" << num((H - Bm + T) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << num((H - Bm + T) / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = palette[k % (sizeof palette / sizeof *palette)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (spec.log_y && !(s.y[i] > 0.0)) {
                continue;
            }
            os << (first ? "" : " ") << num(px(s.x[i])) << ',' << num(py(ty(s.y[i])));
            first = false;
        }
        os << "\"/>\n";
        const double ly = T + 16.0 * static_cast<double>(k) + 10.0;
        os << "<line x1=\"" << num(W - R + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(W - R + 36)
           << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
        os << "<text x=\"" << num(W - R + 42) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace gtqw::cli

#endif
