#include "sqngp/csv.hpp"

#include "sqngp/types.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace sqngp {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvWriter::sep() {
    if (!first_) out_ << ',';
    first_ = false;
}

void CsvWriter::field(double v) {
    sep();
    out_ << format_double(v);
}

void CsvWriter::field(long v) {
    sep();
    out_ << v;
}

void CsvWriter::field(const std::string& v) {
    sep();
    out_ << v;
}

void CsvWriter::end_row() {
    out_ << '\n';
    first_ = true;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (const auto& c : cells) field(c);
    end_row();
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    if (!std::getline(in, line)) throw Error("read_csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != table.header.size()) throw Error("read_csv: ragged row '" + line + "'");
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception&) {
                throw Error("read_csv: cannot parse '" + c + "'");
            }
            if (used != c.size()) throw Error("read_csv: cannot parse '" + c + "'");
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace sqngp
