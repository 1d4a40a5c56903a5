#include "mixlab/csv.hpp"

#include <sstream>

#include "mixlab/errors.hpp"
#include "mixlab/util.hpp"

namespace mixlab {

size_t CsvTable::col(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ValidationError("CSV has no column '" + name + "'");
}

double CsvTable::num(size_t row, size_t column) const {
    return parse_double(rows.at(row).at(column));
}

std::vector<double> CsvTable::column_values(const std::string& name) const {
    const size_t c = col(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) out.push_back(num(r, c));
    return out;
}

std::string CsvTable::to_string() const {
    std::ostringstream os;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) os << ',';
        os << header[i];
    }
    os << '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << row[i];
        }
        os << '\n';
    }
    return os.str();
}

CsvTable CsvTable::parse(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells = split(line, ',');
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != t.header.size()) {
                throw FormatError("CSV row has " + std::to_string(cells.size()) +
                                  " cells, header has " + std::to_string(t.header.size()));
            }
            t.rows.push_back(std::move(cells));
        }
    }
    if (first) throw FormatError("CSV is empty");
    return t;
}

CsvTable CsvTable::load(const std::string& path) {
    return parse(read_text_file(path));
}

}  // namespace mixlab
