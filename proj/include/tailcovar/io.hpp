#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tailcovar/sample.hpp"

namespace tailcovar::io {

/// Comma-separated table with a mandatory header row; every cell numeric.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of a named column; throws BadInput if absent.
    std::size_t column(const std::string& name) const;
    std::vector<double> values(const std::string& name) const;
};

Table read_csv(std::istream& in);
Table read_csv_file(const std::string& path);

/// Two-column `x,y` file.
PairedSample read_pairs(std::istream& in);
PairedSample read_pairs_file(const std::string& path);
void write_pairs(std::ostream& out, const PairedSample& sample);

/// %.17g, locale independent.
std::string format_double(double v);

}  // namespace tailcovar::io
