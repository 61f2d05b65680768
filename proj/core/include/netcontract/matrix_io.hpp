#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "netcontract/matrix_core.hpp"

namespace netcontract::io {

/// Shortest round-trip-safe rendering used for every emitted number
/// ("%.17g").
std::string format_double(double value);

/// Matrix Market "matrix coordinate|array real|integer|pattern
/// general|symmetric|skew-symmetric".
Matrix parse_matrix_market(std::istream& in);

/// Headerless CSV; blank lines and lines starting with '#' are ignored.
Matrix parse_csv_matrix(std::istream& in);

/// Dispatches on the first line: "%%MatrixMarket" selects the Matrix Market
/// reader, anything else is read as CSV.
Matrix read_matrix(const std::filesystem::path& path);

/// Reads a vector stored as a single CSV row, a single CSV column or an n x 1
/// Matrix Market matrix.
Vector read_vector(const std::filesystem::path& path);
Vector parse_vector(std::string_view text);

void write_matrix_csv(std::ostream& out, const Matrix& m);
void write_matrix_market(std::ostream& out, const Matrix& m);

/// Writes Matrix Market when the extension is ".mtx", CSV otherwise.
void write_matrix(const std::filesystem::path& path, const Matrix& m);

} // namespace netcontract::io
