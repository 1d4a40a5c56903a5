#pragma once

#include <string>
#include <vector>

namespace mixlab {

// Minimal CSV: unquoted cells, one header row. Enough for this repo's
// numeric tables; every plot renders from one of these.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    size_t col(const std::string& name) const;
    double num(size_t row, size_t column) const;
    std::vector<double> column_values(const std::string& name) const;

    std::string to_string() const;
    static CsvTable parse(const std::string& text);
    static CsvTable load(const std::string& path);
};

}  // namespace mixlab
