#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace rgp::csv {

struct Row {
    size_t line = 0; // 1-based line number in the source file
    std::vector<std::string> fields;
};

/// Parse a CSV file: comma-separated fields, no quoting, LF or CRLF
/// endings. Empty lines are skipped. The first row is the header.
/// Every file format in this project keeps ids and names comma-free,
/// so the simple split is the whole grammar.
struct File {
    std::vector<std::string> header;
    std::vector<Row> rows;
};

File read_file(const std::string& path);
std::vector<std::string> split_line(const std::string& line);
std::string join(const std::vector<std::string>& fields);

/// Verify the header matches exactly; throws with the file name otherwise.
void require_header(const File& f, const std::vector<std::string>& expected,
                    const std::string& path);

/// Strict numeric field parsers: the whole field must be consumed, so
/// trailing garbage ("2x") is rejected rather than truncated.
long long parse_int(const std::string& field);
double parse_double(const std::string& field);

} // namespace rgp::csv
