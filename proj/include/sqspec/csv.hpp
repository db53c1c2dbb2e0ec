#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sqspec/errors.hpp"

namespace sqspec {

/// Shortest locale-free decimal representation with 15 significant digits.
inline std::string format_value(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.15g", value);
    return buffer;
}

/// One CSV line from the given cells, linefeed terminated.
inline std::string csv_row(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    line += '\n';
    return line;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Parse a numeric CSV with a single header line. Ragged rows or
/// non-numeric cells raise MalformedCsv.
inline CsvTable parse_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (first) {
            table.header = cells;
            first = false;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw Error(ErrorCode::MalformedCsv, "row width differs from header");
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) {
            double value = 0.0;
            const char* begin = cell.data();
            const char* end = begin + cell.size();
            const auto result = std::from_chars(begin, end, value);
            if (result.ec != std::errc{} || result.ptr != end) {
                throw Error(ErrorCode::MalformedCsv, "non-numeric cell '" + cell + "'");
            }
            row.push_back(value);
        }
        table.rows.push_back(std::move(row));
    }
    if (first) {
        throw Error(ErrorCode::MalformedCsv, "input has no header line");
    }
    return table;
}

inline CsvTable parse_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::MalformedCsv, "cannot open '" + path + "'");
    }
    return parse_csv(in);
}

}  // namespace sqspec
