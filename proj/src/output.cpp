#include "warpheat/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace warpheat {

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

namespace {

std::string quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::string cell_text(const Cell& c)
{
    if (auto d = std::get_if<double>(&c)) return format_double(*d);
    if (auto l = std::get_if<long>(&c)) return std::to_string(*l);
    return quote(std::get<std::string>(c));
}

std::string escape_xml(const std::string& s)
{
    std::string o;
    for (char c : s) {
        switch (c) {
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        case '&': o += "&amp;"; break;
        case '"': o += "&quot;"; break;
        default: o += c;
        }
    }
    return o;
}

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

// 1, 2, 5 times a power of ten
double nice_step(double span, int target)
{
    double raw = span / target;
    double p = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * p >= raw) return m * p;
    return 10 * p;
}

} // namespace

void ensure_directory(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw IoError("cannot create output directory " + dir);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), columns_(header.size())
{
    if (!out_) throw IoError("cannot open " + path + " for writing");
    for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << quote(header[k]);
    out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells)
{
    if (cells.size() != columns_) throw std::invalid_argument("csv: row width differs from header");
    for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cell_text(cells[k]);
    out_ << '\n';
    if (!out_) throw IoError("write failed on " + path_);
}

void CsvWriter::close()
{
    out_.close();
    if (!out_) throw IoError("close failed on " + path_);
}

std::string SvgPlot::render() const
{
    const double ml = 80, mr = 170, mt = 40, mb = 60;
    const double pw = width - ml - mr, ph = height - mt - mb;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const Series& s : series)
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
            x0 = std::min(x0, s.x[k]);
            x1 = std::max(x1, s.x[k]);
            y0 = std::min(y0, s.y[k]);
            y1 = std::max(y1, s.y[k]);
        }
    for (const ReferenceLine& r : references) {
        y0 = std::min(y0, r.y);
        y1 = std::max(y1, r.y);
    }
    if (!(x0 <= x1)) x0 = 0, x1 = 1;
    if (!(y0 <= y1)) y0 = 0, y1 = 1;
    if (x1 - x0 <= 0) x0 -= 0.5, x1 += 0.5;
    double pad = y1 - y0 > 0 ? 0.08 * (y1 - y0) : std::max(std::abs(y0) * 0.05, 1e-12);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return mt + (y1 - y) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << num(ml + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape_xml(title) << "</text>\n";
    o << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw) << "\" height=\""
      << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    double sx = nice_step(x1 - x0, 6);
    for (double v = std::ceil(x0 / sx) * sx; v <= x1 + 1e-9 * sx; v += sx) {
        o << "<line x1=\"" << num(px(v)) << "\" y1=\"" << num(mt + ph) << "\" x2=\"" << num(px(v))
          << "\" y2=\"" << num(mt + ph + 5) << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << num(px(v)) << "\" y=\"" << num(mt + ph + 18)
          << "\" text-anchor=\"middle\">" << tick(std::abs(v) < 1e-12 * sx ? 0.0 : v) << "</text>\n";
    }
    double sy = nice_step(y1 - y0, 6);
    for (double v = std::ceil(y0 / sy) * sy; v <= y1 + 1e-9 * sy; v += sy) {
        o << "<line x1=\"" << num(ml - 5) << "\" y1=\"" << num(py(v)) << "\" x2=\"" << num(ml)
          << "\" y2=\"" << num(py(v)) << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\">"
          << tick(std::abs(v) < 1e-12 * sy ? 0.0 : v) << "</text>\n";
    }
    o << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(height - 15.0)
      << "\" text-anchor=\"middle\">" << escape_xml(x_label) << "</text>\n";
    o << "<text x=\"18\" y=\"" << num(mt + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << num(mt + ph / 2) << ")\">" << escape_xml(y_label) << "</text>\n";

    double ly = mt + 10;
    for (const ReferenceLine& r : references) {
        o << "<line x1=\"" << num(ml) << "\" y1=\"" << num(py(r.y)) << "\" x2=\"" << num(ml + pw)
          << "\" y2=\"" << num(py(r.y)) << "\" stroke=\"" << r.color
          << "\" stroke-dasharray=\"6 4\"/>\n";
        o << "<text x=\"" << num(ml + pw + 8) << "\" y=\"" << num(py(r.y) + 4) << "\" fill=\"" << r.color
          << "\">" << escape_xml(r.label) << "</text>\n";
    }
    for (const Series& s : series) {
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < s.x.size(); ++k)
            if (std::isfinite(s.x[k]) && std::isfinite(s.y[k]))
                o << (k ? " " : "") << num(px(s.x[k])) << ',' << num(py(s.y[k]));
        o << "\"/>\n";
        if (markers)
            for (std::size_t k = 0; k < s.x.size(); ++k)
                if (std::isfinite(s.x[k]) && std::isfinite(s.y[k]))
                    o << "<circle cx=\"" << num(px(s.x[k])) << "\" cy=\"" << num(py(s.y[k]))
                      << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
        o << "<text x=\"" << num(ml + pw + 8) << "\" y=\"" << num(ly + 140) << "\" fill=\"" << s.color
          << "\">" << escape_xml(s.name) << "</text>\n";
        ly += 16;
    }
    o << "</svg>\n";
    return o.str();
}

void SvgPlot::write(const std::string& path) const
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << render();
    if (!out) throw IoError("write failed on " + path);
}

} // namespace warpheat
