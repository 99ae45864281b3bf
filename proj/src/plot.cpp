#include "maxlat/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "maxlat/error.hpp"

namespace maxlat::plot {

namespace {

constexpr double kWidth = 900.0, kHeight = 480.0;
constexpr double kLeft = 72.0, kRight = 24.0, kTop = 24.0, kBottom = 56.0;

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                 "#9467bd", "#ff7f0e", "#17becf"};

struct Range {
    double lo = 0.0, hi = 1.0;

    void widen(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    static Range of(const std::vector<double>& vs) {
        Range r{vs.front(), vs.front()};
        for (double v : vs) r.widen(v);
        if (r.lo == r.hi) { // flat data still needs a drawable span
            r.lo -= 1.0;
            r.hi += 1.0;
        }
        return r;
    }
    double frac(double v) const { return (v - lo) / (hi - lo); }
};

std::string fmt(double v) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

// Round tick spacing to 1/2/5 times a power of ten.
std::vector<double> ticks(const Range& r, int target = 6) {
    const double raw = (r.hi - r.lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    std::vector<double> out;
    for (double v = std::ceil(r.lo / step) * step; v <= r.hi + step * 1e-9; v += step)
        out.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
    return out;
}

class SvgCanvas {
public:
    SvgCanvas(const std::filesystem::path& path, Range x, Range y) : out_(path), x_(x), y_(y) {
        if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
        path_ = path;
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
             << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
             << "\">\n";
        out_ << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
             << "\" fill=\"white\"/>\n";
    }

    double px(double v) const { return kLeft + x_.frac(v) * (kWidth - kLeft - kRight); }
    double py(double v) const { return kHeight - kBottom - y_.frac(v) * (kHeight - kTop - kBottom); }

    void frame_and_ticks(std::string_view x_label, std::string_view y_label) {
        out_ << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
             << kWidth - kLeft - kRight << "\" height=\"" << kHeight - kTop - kBottom
             << "\" fill=\"none\" stroke=\"#444\"/>\n";
        for (double tx : ticks(x_)) {
            const double X = px(tx);
            out_ << "<line x1=\"" << fmt(X) << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
                 << fmt(X) << "\" y2=\"" << kHeight - kBottom + 5 << "\" stroke=\"#444\"/>\n";
            out_ << "<text x=\"" << fmt(X) << "\" y=\"" << kHeight - kBottom + 20
                 << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt(tx) << "</text>\n";
        }
        for (double ty : ticks(y_)) {
            const double Y = py(ty);
            out_ << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fmt(Y) << "\" x2=\"" << kLeft
                 << "\" y2=\"" << fmt(Y) << "\" stroke=\"#444\"/>\n";
            out_ << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(Y + 4)
                 << "\" font-size=\"12\" text-anchor=\"end\">" << fmt(ty) << "</text>\n";
            out_ << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(Y) << "\" x2=\""
                 << kWidth - kRight << "\" y2=\"" << fmt(Y)
                 << "\" stroke=\"#eee\" stroke-width=\"0.5\"/>\n";
        }
        out_ << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 16
             << "\" font-size=\"14\" text-anchor=\"middle\">" << std::string(x_label)
             << "</text>\n";
        out_ << "<text x=\"18\" y=\"" << (kTop + kHeight - kBottom) / 2
             << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
             << fmt((kTop + kHeight - kBottom) / 2) << ")\">" << std::string(y_label)
             << "</text>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const char* color) {
        out_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        for (const auto& [x, y] : pts) out_ << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
        out_ << "\"/>\n";
    }

    void legend(const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            const double Y = kTop + 16 + 18 * static_cast<double>(i);
            out_ << "<line x1=\"" << kLeft + 10 << "\" y1=\"" << fmt(Y - 4) << "\" x2=\""
                 << kLeft + 34 << "\" y2=\"" << fmt(Y - 4) << "\" stroke=\""
                 << kPalette[i % kPalette.size()] << "\" stroke-width=\"2\"/>\n";
            out_ << "<text x=\"" << kLeft + 40 << "\" y=\"" << fmt(Y)
                 << "\" font-size=\"12\">" << names[i] << "</text>\n";
        }
    }

    void finish() {
        out_ << "</svg>\n";
        if (!out_) throw IoError("write failed for '" + path_.string() + "'");
    }

private:
    std::ofstream out_;
    std::filesystem::path path_;
    Range x_, y_;
};

} // namespace

void render_line_plot(const std::vector<io::NamedSeries>& series,
                      const std::filesystem::path& path, std::string_view x_label,
                      std::string_view y_label) {
    if (series.empty()) throw ValidationError("nothing to plot");
    std::vector<double> xs, ys;
    for (const auto& s : series)
        for (const auto& pt : s.series) {
            xs.push_back(static_cast<double>(pt.t));
            ys.push_back(pt.value);
        }
    if (xs.empty()) throw ValidationError("nothing to plot");

    SvgCanvas canvas(path, Range::of(xs), Range::of(ys));
    canvas.frame_and_ticks(x_label, y_label);
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(series[i].series.size());
        for (const auto& pt : series[i].series)
            pts.emplace_back(static_cast<double>(pt.t), pt.value);
        canvas.polyline(pts, kPalette[i % kPalette.size()]);
    }
    if (series.size() > 1) {
        std::vector<std::string> names;
        for (const auto& s : series) names.push_back(s.name);
        canvas.legend(names);
    }
    canvas.finish();
}

void render_xy_plot(const analysis::Series& abscissa, const analysis::Series& ordinate,
                    const std::filesystem::path& path, std::string_view x_label,
                    std::string_view y_label) {
    if (abscissa.size() != ordinate.size() || abscissa.empty())
        throw ValidationError("xy plot needs two equally long series");
    std::vector<double> xs, ys;
    std::vector<std::pair<double, double>> pts;
    pts.reserve(abscissa.size());
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
        if (abscissa[i].t != ordinate[i].t)
            throw ValidationError("xy plot series must share their t column");
        xs.push_back(abscissa[i].value);
        ys.push_back(ordinate[i].value);
        pts.emplace_back(abscissa[i].value, ordinate[i].value);
    }
    SvgCanvas canvas(path, Range::of(xs), Range::of(ys));
    canvas.frame_and_ticks(x_label, y_label);
    canvas.polyline(pts, kPalette[0]);
    canvas.finish();
}

} // namespace maxlat::plot
