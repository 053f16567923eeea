#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace memlearn {

// One CSV cell. Doubles are rendered with %.9g so files are byte-identical
// across runs of the same build.
using CsvCell = std::variant<long long, double, std::string>;
using CsvRow = std::vector<CsvCell>;

std::string csv_format(const CsvCell& cell);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const CsvRow& cells);
    void close();

private:
    std::FILE* f_ = nullptr;
    std::filesystem::path path_;
    std::size_t width_;
};

// Minimal multi-series line plot written as a standalone SVG file.
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    int width = 720;
    int height = 480;
    bool log_x = false;
};

void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec);

} // namespace memlearn
