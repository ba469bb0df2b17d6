#pragma once

#include <string>
#include <vector>

#include "sfspline/types.hpp"

namespace sfs {

/// One parsed CSV: header names plus a dense numeric body.
struct CsvTable {
    std::vector<std::string> header;
    Matrix values;  // rows x header.size()
};

/// Reads a comma-separated file with a mandatory header line. Every record
/// must have exactly as many fields as the header; fields must parse as
/// finite decimal numbers. Violations raise io_error with the line number.
CsvTable read_csv(const std::string& path);

/// Writes values with round-trip precision (17 significant digits).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& values);

/// Interprets a table with header x1..xd,y (in any column order is NOT
/// supported; the trailing column must be y) as a RawTable.
RawTable table_to_raw(const CsvTable& table);

/// Interprets a table with header x1..xd as a point matrix.
Matrix table_to_points(const CsvTable& table);

}  // namespace sfs
