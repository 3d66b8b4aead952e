#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

// Tiny SVG plot helpers. Coordinates are formatted with fixed precision so the
// output is byte-stable across runs.
namespace svgplot {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

struct Frame {
    double width = 640, height = 520;
    double ml = 70, mr = 24, mt = 44, mb = 58;  // margins
    double x0 = 0, x1 = 1;                      // data ranges
    double y0 = 0, y1 = 1;
    bool y_down = false;  // true: y0 maps to the TOP edge (funnel SE axis)

    double px(double x) const { return ml + (x - x0) / (x1 - x0) * (width - ml - mr); }
    double py(double y) const {
        const double f = (y - y0) / (y1 - y0);
        const double span = height - mt - mb;
        return y_down ? mt + f * span : height - mb - f * span;
    }
};

inline std::string header(const Frame& f) {
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(f.width) +
                    "\" height=\"" + fmt(f.height) + "\" viewBox=\"0 0 " + fmt(f.width) + " " +
                    fmt(f.height) + "\">\n";
    s += "<rect width=\"" + fmt(f.width) + "\" height=\"" + fmt(f.height) + "\" fill=\"white\"/>\n";
    return s;
}

inline std::string footer() { return "</svg>\n"; }

inline std::string line(double x1, double y1, double x2, double y2, const std::string& attrs) {
    return "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) + "\" y2=\"" +
           fmt(y2) + "\" " + attrs + "/>\n";
}

inline std::string circle(double cx, double cy, double r, const std::string& attrs) {
    return "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" + fmt(r) + "\" " + attrs +
           "/>\n";
}

inline std::string text(double x, double y, const std::string& anchor, int size,
                        const std::string& content, const std::string& extra = "") {
    return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" text-anchor=\"" + anchor +
           "\" font-family=\"sans-serif\" font-size=\"" + std::to_string(size) + "\" " + extra +
           ">" + content + "</text>\n";
}

inline std::string polyline(const Frame& f, const std::vector<std::pair<double, double>>& pts,
                            const std::string& attrs, bool close = false) {
    std::string s = close ? "<polygon points=\"" : "<polyline points=\"";
    for (const auto& [x, y] : pts) s += fmt(f.px(x)) + "," + fmt(f.py(y)) + " ";
    if (!s.empty() && s.back() == ' ') s.pop_back();
    s += "\" fill=\"none\" " + attrs + "/>\n";
    return s;
}

// Plot frame with box, ticks and labels. Tick positions are data coordinates.
inline std::string axes(const Frame& f, const std::vector<double>& xticks,
                        const std::vector<double>& yticks, const std::string& xlabel,
                        const std::string& ylabel, const std::string& title) {
    const std::string axis_attr = "stroke=\"black\" stroke-width=\"1\"";
    std::string s;
    s += "<rect x=\"" + fmt(f.ml) + "\" y=\"" + fmt(f.mt) + "\" width=\"" +
         fmt(f.width - f.ml - f.mr) + "\" height=\"" + fmt(f.height - f.mt - f.mb) +
         "\" fill=\"none\" " + axis_attr + "/>\n";
    for (double t : xticks) {
        const double x = f.px(t);
        s += line(x, f.height - f.mb, x, f.height - f.mb + 5, axis_attr);
        char lab[32];
        std::snprintf(lab, sizeof lab, "%g", t);
        s += text(x, f.height - f.mb + 18, "middle", 11, lab);
    }
    for (double t : yticks) {
        const double y = f.py(t);
        s += line(f.ml - 5, y, f.ml, y, axis_attr);
        char lab[32];
        std::snprintf(lab, sizeof lab, "%g", t);
        s += text(f.ml - 8, y + 4, "end", 11, lab);
    }
    s += text(0.5 * (f.ml + f.width - f.mr), f.height - 14, "middle", 13, xlabel);
    s += text(16, 0.5 * (f.mt + f.height - f.mb), "middle", 13, ylabel,
              "transform=\"rotate(-90 16 " + fmt(0.5 * (f.mt + f.height - f.mb)) + ")\"");
    s += text(0.5 * f.width, 24, "middle", 15, title, "font-weight=\"bold\"");
    return s;
}

} // namespace svgplot
