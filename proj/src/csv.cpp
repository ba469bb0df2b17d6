#include "sfspline/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sfspline/errors.hpp"

namespace sfs {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

double parse_field(const std::string& raw, std::size_t line_no, std::size_t col) {
    const std::string f = trim(raw);
    if (f.empty())
        throw io_error("line " + std::to_string(line_no) + ", field " +
                       std::to_string(col + 1) + ": missing value");
    double v = 0.0;
    const auto* begin = f.data();
    const auto* end = f.data() + f.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw io_error("line " + std::to_string(line_no) + ", field " +
                       std::to_string(col + 1) + ": cannot parse '" + f + "'");
    if (!std::isfinite(v))
        throw io_error("line " + std::to_string(line_no) + ", field " +
                       std::to_string(col + 1) + ": non-finite value");
    return v;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");

    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw io_error("'" + path + "': empty file");
    for (const auto& h : split_line(line)) table.header.push_back(trim(h));
    const std::size_t ncol = table.header.size();

    std::vector<double> body;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_line(line);
        if (fields.size() != ncol)
            throw io_error("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(ncol) + " fields, got " +
                           std::to_string(fields.size()));
        for (std::size_t c = 0; c < ncol; ++c)
            body.push_back(parse_field(fields[c], line_no, c));
    }

    const std::size_t nrow = body.size() / ncol;
    table.values.resize(static_cast<Index>(nrow), static_cast<Index>(ncol));
    for (std::size_t r = 0; r < nrow; ++r)
        for (std::size_t c = 0; c < ncol; ++c)
            table.values(static_cast<Index>(r), static_cast<Index>(c)) =
                body[r * ncol + c];
    return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& values) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out << ',';
        out << header[c];
    }
    out << '\n';
    char buf[64];
    for (Index r = 0; r < values.rows(); ++r) {
        for (Index c = 0; c < values.cols(); ++c) {
            if (c) out << ',';
            std::snprintf(buf, sizeof buf, "%.17g", values(r, c));
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw io_error("write failed for '" + path + "'");
}

RawTable table_to_raw(const CsvTable& table) {
    const Index ncol = table.values.cols();
    if (ncol < 2)
        throw io_error("need at least one predictor column plus y");
    if (table.header.back() != "y")
        throw io_error("last column must be named 'y', got '" +
                       table.header.back() + "'");
    RawTable raw;
    raw.x = table.values.leftCols(ncol - 1);
    raw.y = table.values.col(ncol - 1);
    return raw;
}

Matrix table_to_points(const CsvTable& table) {
    if (table.values.cols() < 1) throw io_error("no coordinate columns");
    return table.values;
}

}  // namespace sfs
