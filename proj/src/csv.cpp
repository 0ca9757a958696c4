#include "sbseg/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sbseg {
namespace {

void split_line(const std::string& line, std::vector<std::string>& out) {
    out.clear();
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        std::size_t a = 0, b = cell.size();
        while (a < b && std::isspace(static_cast<unsigned char>(cell[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(cell[b - 1]))) --b;
        out.push_back(cell.substr(a, b - a));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
}

bool parse_cell(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

} // namespace

MultivariateSeries read_series_csv(std::istream& in, const std::string& name) {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> cells;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    bool first_data_row = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        split_line(line, cells);
        std::vector<double> row(cells.size());
        bool numeric = true;
        std::size_t bad_col = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!parse_cell(cells[c], row[c])) {
                numeric = false;
                bad_col = c;
                break;
            }
            if (!std::isfinite(row[c])) {
                throw CsvError(name + ":" + std::to_string(lineno) + ": non-finite value in column " +
                               std::to_string(c + 1));
            }
        }
        if (!numeric) {
            if (first_data_row) continue; // header row
            throw CsvError(name + ":" + std::to_string(lineno) + ": non-numeric cell in column " +
                           std::to_string(bad_col + 1));
        }
        if (first_data_row) {
            width = row.size();
            first_data_row = false;
        } else if (row.size() != width) {
            throw CsvError(name + ":" + std::to_string(lineno) + ": expected " + std::to_string(width) +
                           " columns, got " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty() || width == 0) throw CsvError(name + ": no numeric data rows");

    MultivariateSeries x(static_cast<int>(width), static_cast<int>(rows.size()));
    for (int t = 0; t < x.T; ++t)
        for (int j = 0; j < x.p; ++j) x.at(j, t) = rows[t][j];
    return x;
}

MultivariateSeries read_series_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path);
    return read_series_csv(in, path);
}

void write_series_csv(std::ostream& out, const MultivariateSeries& x) {
    out.precision(17);
    for (int j = 0; j < x.p; ++j) out << (j ? ",x" : "x") << (j + 1);
    out << '\n';
    for (int t = 0; t < x.T; ++t) {
        for (int j = 0; j < x.p; ++j) {
            if (j) out << ',';
            out << x.at(j, t);
        }
        out << '\n';
    }
}

void write_series_csv_file(const std::string& path, const MultivariateSeries& x) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_series_csv(out, x);
    if (!out) throw std::runtime_error("failed writing " + path);
}

} // namespace sbseg
