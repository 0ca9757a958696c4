#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbseg/series.hpp"

namespace sbseg {

/// Malformed CSV input: ragged rows, non-numeric cells, NaN.
class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Read a series matrix: rows = time, columns = components. A non-numeric
/// first row is treated as a header and skipped.
MultivariateSeries read_series_csv(std::istream& in, const std::string& name = "<stream>");
MultivariateSeries read_series_csv_file(const std::string& path);

/// Write rows = time, columns = components, with an x1..xp header.
void write_series_csv(std::ostream& out, const MultivariateSeries& x);
void write_series_csv_file(const std::string& path, const MultivariateSeries& x);

} // namespace sbseg
