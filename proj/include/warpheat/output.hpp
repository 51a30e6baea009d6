#pragma once

// CSV and SVG emitters. Floats are written in 17-significant-digit scientific
// notation so files round-trip doubles and are byte-stable across runs.

#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace warpheat {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string format_double(double x);

using Cell = std::variant<double, long, std::string>;

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<Cell>& cells);
    void close();

private:
    std::ofstream out_;
    std::string path_;
    std::size_t columns_;
};

struct Series {
    std::string name;
    std::vector<double> x, y;
    std::string color = "#1f77b4";
};

struct ReferenceLine {
    double y = 0;
    std::string label;
    std::string color = "#d62728";
};

// Static line plot with axes, tick labels and horizontal reference lines.
struct SvgPlot {
    std::string title, x_label, y_label;
    std::vector<Series> series;
    std::vector<ReferenceLine> references;
    bool markers = true;
    int width = 720, height = 480;

    std::string render() const;
    void write(const std::string& path) const;
};

// Creates the directory (and parents) if needed; throws IoError on failure.
void ensure_directory(const std::string& dir);

} // namespace warpheat
