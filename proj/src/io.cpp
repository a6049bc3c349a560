#include "tailcovar/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tailcovar/error.hpp"

namespace tailcovar::io {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        auto b = cell.find_first_not_of(" \t\r");
        auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& s, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        if (s == "nan" || s == "NaN") return std::nan("");
        throw Error(ErrorCode::BadInput, "line " + std::to_string(line_no) + ": cannot parse '" + s + "'");
    }
    return v;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw Error(ErrorCode::BadInput, "missing CSV column '" + name + "'");
}

std::vector<double> Table::values(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

Table read_csv(std::istream& in) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (t.header.empty()) {
            t.header = split(line);
            continue;
        }
        auto cells = split(line);
        if (cells.size() != t.header.size())
            throw Error(ErrorCode::BadInput, "line " + std::to_string(line_no) + ": expected " +
                                                 std::to_string(t.header.size()) + " fields");
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_cell(c, line_no));
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw Error(ErrorCode::BadInput, "CSV input has no header row");
    return t;
}

Table read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BadInput, "cannot open '" + path + "'");
    return read_csv(in);
}

PairedSample read_pairs(std::istream& in) {
    Table t = read_csv(in);
    return {t.values("x"), t.values("y")};
}

PairedSample read_pairs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BadInput, "cannot open '" + path + "'");
    return read_pairs(in);
}

void write_pairs(std::ostream& out, const PairedSample& sample) {
    out << "x,y\n";
    for (std::size_t i = 0; i < sample.size(); ++i)
        out << format_double(sample.x[i]) << ',' << format_double(sample.y[i]) << '\n';
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

}  // namespace tailcovar::io
