#include "memlearn/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace memlearn {

namespace {

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\n") != std::string::npos;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

} // namespace

std::string csv_format(const CsvCell& cell) {
    if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&cell)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9g", *d);
        return buf;
    }
    const auto& s = std::get<std::string>(cell);
    return needs_quoting(s) ? quote(s) : s;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), width_(header.size()) {
    if (header.empty()) throw std::invalid_argument("csv: header must not be empty");
    f_ = std::fopen(path.string().c_str(), "wb");
    if (f_ == nullptr) throw std::runtime_error("csv: cannot open " + path.string() + " for writing");
    std::string line;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i > 0) line += ',';
        line += needs_quoting(header[i]) ? quote(header[i]) : header[i];
    }
    line += '\n';
    std::fwrite(line.data(), 1, line.size(), f_);
}

CsvWriter::~CsvWriter() {
    if (f_ != nullptr) std::fclose(f_);
}

void CsvWriter::row(const CsvRow& cells) {
    if (f_ == nullptr) throw std::logic_error("csv: writer already closed");
    if (cells.size() != width_) throw std::invalid_argument("csv: row width does not match header");
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) line += ',';
        line += csv_format(cells[i]);
    }
    line += '\n';
    if (std::fwrite(line.data(), 1, line.size(), f_) != line.size())
        throw std::runtime_error("csv: short write to " + path_.string());
}

void CsvWriter::close() {
    if (f_ == nullptr) return;
    if (std::fclose(f_) != 0) {
        f_ = nullptr;
        throw std::runtime_error("csv: error closing " + path_.string());
    }
    f_ = nullptr;
}

namespace {

struct Extent {
    double lo = 0.0;
    double hi = 1.0;
};

Extent extent_of(const std::vector<PlotSeries>& series, bool take_x, bool log_scale) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : series) {
        const auto& v = take_x ? s.x : s.y;
        for (double d : v) {
            if (log_scale && d <= 0.0) continue;
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    }
    if (!(lo <= hi)) return {0.0, 1.0};
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    return {lo, hi};
}

std::string fnum(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
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

} // namespace

void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec) {
    const int ml = 64, mr = 16, mt = 36, mb = 48;
    const double pw = spec.width - ml - mr;
    const double ph = spec.height - mt - mb;
    if (pw <= 0 || ph <= 0) throw std::invalid_argument("svg: plot area is empty");

    Extent ex = extent_of(spec.series, true, spec.log_x);
    Extent ey = extent_of(spec.series, false, false);
    double xlo = spec.log_x ? std::log10(ex.lo) : ex.lo;
    double xhi = spec.log_x ? std::log10(ex.hi) : ex.hi;

    auto sx = [&](double v) {
        double t = spec.log_x ? std::log10(v) : v;
        return ml + (t - xlo) / (xhi - xlo) * pw;
    };
    auto sy = [&](double v) { return mt + (ey.hi - v) / (ey.hi - ey.lo) * ph; };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) +
           "\" height=\"" + std::to_string(spec.height) + "\" viewBox=\"0 0 " +
           std::to_string(spec.width) + " " + std::to_string(spec.height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fnum(spec.width / 2.0) + "\" y=\"20\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">" + xml_escape(spec.title) + "</text>\n";

    // axes
    svg += "<line x1=\"" + fnum(ml) + "\" y1=\"" + fnum(mt + ph) + "\" x2=\"" + fnum(ml + pw) +
           "\" y2=\"" + fnum(mt + ph) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fnum(ml) + "\" y1=\"" + fnum(mt) + "\" x2=\"" + fnum(ml) + "\" y2=\"" +
           fnum(mt + ph) + "\" stroke=\"black\"/>\n";

    // ticks: 5 per axis, value labels
    for (int t = 0; t <= 4; ++t) {
        double fx = xlo + (xhi - xlo) * t / 4.0;
        double vx = spec.log_x ? std::pow(10.0, fx) : fx;
        double px = ml + pw * t / 4.0;
        svg += "<line x1=\"" + fnum(px) + "\" y1=\"" + fnum(mt + ph) + "\" x2=\"" + fnum(px) +
               "\" y2=\"" + fnum(mt + ph + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fnum(px) + "\" y=\"" + fnum(mt + ph + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + fnum(vx) +
               "</text>\n";

        double vy = ey.lo + (ey.hi - ey.lo) * t / 4.0;
        double py = mt + ph - ph * t / 4.0;
        svg += "<line x1=\"" + fnum(ml - 5) + "\" y1=\"" + fnum(py) + "\" x2=\"" + fnum(ml) +
               "\" y2=\"" + fnum(py) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fnum(ml - 8) + "\" y=\"" + fnum(py + 3) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + fnum(vy) +
               "</text>\n";
    }

    svg += "<text x=\"" + fnum(ml + pw / 2.0) + "\" y=\"" + fnum(spec.height - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           xml_escape(spec.x_label) + "</text>\n";
    svg += "<text x=\"14\" y=\"" + fnum(mt + ph / 2.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 " +
           fnum(mt + ph / 2.0) + ")\">" + xml_escape(spec.y_label) + "</text>\n";

    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const auto& s = spec.series[si];
        if (s.x.size() != s.y.size()) throw std::invalid_argument("svg: series x/y lengths differ");
        if (s.x.empty()) continue;
        const char* color = palette[si % (sizeof palette / sizeof palette[0])];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (spec.log_x && s.x[i] <= 0.0) continue;
            pts += fnum(sx(s.x[i])) + "," + fnum(sy(s.y[i])) + " ";
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        if (!s.label.empty()) {
            double lx = ml + pw - 8;
            double ly = mt + 14 + 14.0 * static_cast<double>(si);
            svg += "<text x=\"" + fnum(lx) + "\" y=\"" + fnum(ly) +
                   "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" +
                   color + "\">" + xml_escape(s.label) + "</text>\n";
        }
    }
    svg += "</svg>\n";

    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (f == nullptr) throw std::runtime_error("svg: cannot open " + path.string() + " for writing");
    std::fwrite(svg.data(), 1, svg.size(), f);
    if (std::fclose(f) != 0) throw std::runtime_error("svg: error closing " + path.string());
}

} // namespace memlearn
