#include "cavistim/io/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace cavistim::io {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

constexpr double kLeft = 80, kRight = 200, kTop = 50, kBottom = 70;

struct Series {
    std::string label;
    std::vector<double> x, y;
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    if (v == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s)
{
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

// Ticks at 1, 2 or 5 times a power of ten, about six per axis.
std::vector<double> nice_ticks(double lo, double hi)
{
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    for (double v = std::ceil(lo / step - 1e-9) * step; v <= hi + 1e-9 * step; v += step) {
        ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return ticks;
}

std::pair<double, double> padded_range(double lo, double hi)
{
    if (!(lo <= hi)) return {0.0, 1.0};
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        const double pad = std::max(0.5, 0.1 * std::abs(hi));
        return {lo - pad, hi + pad};
    }
    return {lo, hi};
}

}  // namespace

std::string render_svg(const CsvTable& table, const PlotSpec& spec)
{
    const auto xs = table.numeric_column(spec.x);

    std::vector<std::string> ycols = spec.y;
    if (ycols.empty()) {
        for (const auto& h : table.header) {
            if (h != spec.x && h != "trace_err" && h != spec.group_by) ycols.push_back(h);
        }
    }

    std::vector<Series> series;
    if (spec.group_by.empty()) {
        for (const auto& name : ycols) series.push_back({name, xs, table.numeric_column(name)});
    } else {
        const auto groups = table.numeric_column(spec.group_by);
        std::map<double, std::size_t> slot;
        for (double g : groups) slot.emplace(g, 0);
        for (const auto& name : ycols) {
            const auto ys = table.numeric_column(name);
            std::size_t base = series.size();
            std::size_t k = 0;
            for (auto& [g, s] : slot) {
                s = base + k++;
                std::string label = name + " (" + spec.group_by + "=" + tick_label(g) + ")";
                series.push_back({ycols.size() == 1 ? spec.group_by + "=" + tick_label(g) : label, {}, {}});
            }
            for (std::size_t r = 0; r < xs.size(); ++r) {
                series[slot[groups[r]]].x.push_back(xs[r]);
                series[slot[groups[r]]].y.push_back(ys[r]);
            }
        }
    }

    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, s.y[i]);
            yhi = std::max(yhi, s.y[i]);
        }
    }
    std::tie(xlo, xhi) = padded_range(xlo, xhi);
    std::tie(ylo, yhi) = padded_range(ylo, yhi);

    const double pw = kCanvasWidth - kLeft - kRight;
    const double ph = kCanvasHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xlo) / (xhi - xlo) * pw; };
    auto py = [&](double y) { return kTop + (yhi - y) / (yhi - ylo) * ph; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvasWidth << "\" height=\"" << kCanvasHeight
       << "\" viewBox=\"0 0 " << kCanvasWidth << ' ' << kCanvasHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!spec.title.empty()) {
        os << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">"
           << escape(spec.title) << "</text>\n";
    }

    os << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    const auto xt = nice_ticks(xlo, xhi);
    const auto yt = nice_ticks(ylo, yhi);
    for (double v : xt) os << "<line x1=\"" << fmt(px(v)) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(px(v))
                           << "\" y2=\"" << fmt(kTop + ph) << "\"/>\n";
    for (double v : yt) os << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(py(v)) << "\" x2=\"" << fmt(kLeft + pw)
                           << "\" y2=\"" << fmt(py(v)) << "\"/>\n";
    os << "</g>\n";
    os << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double v : xt) {
        os << "<text x=\"" << fmt(px(v)) << "\" y=\"" << fmt(kTop + ph + 18) << "\" text-anchor=\"middle\">"
           << tick_label(v) << "</text>\n";
    }
    for (double v : yt) {
        os << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(py(v) + 4) << "\" text-anchor=\"end\">" << tick_label(v)
           << "</text>\n";
    }
    const std::string xl = spec.x_label.empty() ? spec.x : spec.x_label;
    os << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kCanvasHeight - 20.0)
       << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n";
    if (!spec.y_label.empty()) {
        os << "<text transform=\"translate(20," << fmt(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
           << escape(spec.y_label) << "</text>\n";
    }

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % kPalette.size()];
        std::size_t finite = 0;
        for (std::size_t i = 0; i < s.x.size(); ++i) finite += std::isfinite(s.x[i]) && std::isfinite(s.y[i]);
        if (finite >= 2) {
            // NaN cells break the line into segments
            os << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" d=\"";
            bool pen = false;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                    pen = false;
                    continue;
                }
                os << (pen ? 'L' : 'M') << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
                pen = true;
            }
            os << "\"/>\n";
        }
        if (finite < 2 || s.x.size() <= 40) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                os << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i])) << "\" r=\"3\" fill=\""
                   << color << "\"/>\n";
            }
        }
        const double ly = kTop + 10 + 18.0 * static_cast<double>(k);
        const double lx = kLeft + pw + 14;
        os << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 20) << "\" y2=\"" << fmt(ly)
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << fmt(lx + 26) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::filesystem::path render_plot(const std::filesystem::path& csv_path, const PlotSpec& spec,
                                  std::filesystem::path svg_path)
{
    const CsvTable table = read_csv(csv_path);
    if (svg_path.empty()) svg_path = std::filesystem::path(csv_path).replace_extension(".svg");
    const std::string svg = render_svg(table, spec);
    std::ofstream out(svg_path, std::ios::binary);
    if (!out) throw CsvError("cannot write " + svg_path.string());
    out << svg;
    return svg_path;
}

}  // namespace cavistim::io
