#include "rsc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rsc::svg {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
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

struct Bounds {
    double x_min = std::numeric_limits<double>::max();
    double x_max = std::numeric_limits<double>::lowest();
    double y_min = std::numeric_limits<double>::max();
    double y_max = std::numeric_limits<double>::lowest();

    void include(double x, double y) {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
    }

    void pad() {
        if (x_min > x_max) { x_min = 0; x_max = 1; }
        if (y_min > y_max) { y_min = 0; y_max = 1; }
        if (x_min == x_max) { x_min -= 0.5; x_max += 0.5; }
        if (y_min == y_max) { y_min -= 0.5; y_max += 0.5; }
    }
};

// margins: left 60, right 20, top 36, bottom 48
struct Mapper {
    Bounds b;
    int w, h;
    bool log_y;

    double tx(double x) const {
        return 60.0 + (x - b.x_min) / (b.x_max - b.x_min) * (w - 80.0);
    }
    double ty(double y) const {
        if (log_y) y = std::log10(std::max(y, 1e-300));
        return (h - 48.0) - (y - b.y_min) / (b.y_max - b.y_min) * (h - 84.0);
    }
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

void chart_frame(std::ostringstream& os, const Mapper& m, const ChartOptions& opt) {
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
       << opt.height << "\" viewBox=\"0 0 " << opt.width << " " << opt.height << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    os << "<line x1=\"60\" y1=\"" << (opt.height - 48) << "\" x2=\"" << (opt.width - 20)
       << "\" y2=\"" << (opt.height - 48) << "\" stroke=\"black\"/>\n"
       << "<line x1=\"60\" y1=\"36\" x2=\"60\" y2=\"" << (opt.height - 48)
       << "\" stroke=\"black\"/>\n";
    // ticks
    for (int i = 0; i <= 5; ++i) {
        double fx = m.b.x_min + (m.b.x_max - m.b.x_min) * i / 5.0;
        double px = m.tx(fx);
        os << "<line x1=\"" << fmt(px) << "\" y1=\"" << (opt.height - 48) << "\" x2=\"" << fmt(px)
           << "\" y2=\"" << (opt.height - 44) << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << fmt(px) << "\" y=\"" << (opt.height - 30)
           << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
        double fy = m.b.y_min + (m.b.y_max - m.b.y_min) * i / 5.0;
        double py = (opt.height - 48.0) - (fy - m.b.y_min) / (m.b.y_max - m.b.y_min) *
                                              (opt.height - 84.0);
        double shown = opt.log_y ? std::pow(10.0, fy) : fy;
        os << "<line x1=\"56\" y1=\"" << fmt(py) << "\" x2=\"60\" y2=\"" << fmt(py)
           << "\" stroke=\"black\"/>\n"
           << "<text x=\"52\" y=\"" << fmt(py + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
           << fmt(shown) << "</text>\n";
    }
    if (!opt.title.empty())
        os << "<text x=\"" << (opt.width / 2)
           << "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">" << xml_escape(opt.title)
           << "</text>\n";
    if (!opt.x_label.empty())
        os << "<text x=\"" << (opt.width / 2) << "\" y=\"" << (opt.height - 8)
           << "\" font-size=\"12\" text-anchor=\"middle\">" << xml_escape(opt.x_label)
           << "</text>\n";
    if (!opt.y_label.empty())
        os << "<text x=\"14\" y=\"" << (opt.height / 2)
           << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
           << (opt.height / 2) << ")\">" << xml_escape(opt.y_label) << "</text>\n";
}

void legend(std::ostringstream& os, const std::vector<Series>& series, const ChartOptions& opt) {
    int y = 44;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].label.empty()) continue;
        const std::string& color =
            series[i].color.empty() ? kPalette[i % 6] : series[i].color;
        os << "<rect x=\"" << (opt.width - 170) << "\" y=\"" << (y - 9)
           << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n"
           << "<text x=\"" << (opt.width - 152) << "\" y=\"" << y << "\" font-size=\"11\">"
           << xml_escape(series[i].label) << "</text>\n";
        y += 18;
    }
}

Mapper make_mapper(const std::vector<Series>& series, const ChartOptions& opt) {
    Bounds b;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double y = s.y[i];
            if (opt.log_y) y = std::log10(std::max(y, 1e-300));
            b.include(s.x[i], y);
        }
    b.pad();
    return Mapper{b, opt.width, opt.height, opt.log_y};
}

}  // namespace

std::string line_chart(const std::vector<Series>& series, const ChartOptions& opt) {
    Mapper m = make_mapper(series, opt);
    std::ostringstream os;
    chart_frame(os, m, opt);
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const std::string& color = s.color.empty() ? kPalette[si % 6] : s.color;
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << fmt(m.tx(s.x[i])) << ',' << fmt(m.ty(s.y[i])) << ' ';
        os << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << "<circle cx=\"" << fmt(m.tx(s.x[i])) << "\" cy=\"" << fmt(m.ty(s.y[i]))
               << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    legend(os, series, opt);
    os << "</svg>\n";
    return os.str();
}

std::string scatter_chart(const std::vector<Series>& series, const ChartOptions& opt) {
    Mapper m = make_mapper(series, opt);
    std::ostringstream os;
    chart_frame(os, m, opt);
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const std::string& color = s.color.empty() ? kPalette[si % 6] : s.color;
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << "<circle cx=\"" << fmt(m.tx(s.x[i])) << "\" cy=\"" << fmt(m.ty(s.y[i]))
               << "\" r=\"3\" fill=\"" << color << "\" fill-opacity=\"0.6\"/>\n";
    }
    legend(os, series, opt);
    os << "</svg>\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << content;
}

}  // namespace rsc::svg
