#pragma once

#include <string>
#include <vector>

namespace kgc {

// A table of doubles with named columns, in row order.
struct Series {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// %.17g, so every double survives a write/read round trip bit for bit.
std::string format_double(double v);

// Header line then one row per line. An empty series gives a header-only file.
void write_csv(const std::string& path, const Series& s);
Series read_csv(const std::string& path);
// One JSON object per row with keys in column order. Non-finite values are written
// as the strings "NaN", "Infinity", "-Infinity". An empty series gives an empty file.
void write_ndjson(const std::string& path, const Series& s);
// Columns are taken from the first row; an empty file gives an empty series.
Series read_ndjson(const std::string& path);
// Dispatches on format "csv" or "ndjson".
void emit_spectrum_series(const std::string& path, const Series& s, const std::string& format);

// Lower-case hex SHA-256 of the file contents.
std::string sha256_file(const std::string& path);

} // namespace kgc
