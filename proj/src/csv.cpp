#include "rgp/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rgp/error.hpp"

namespace rgp::csv {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.push_back(field);
    return out;
}

std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += fields[i];
    }
    return out;
}

File read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open ", path);

    File f;
    std::string line;
    size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!have_header) {
            f.header = split_line(line);
            have_header = true;
        } else {
            f.rows.push_back({lineno, split_line(line)});
        }
    }
    return f;
}

void require_header(const File& f, const std::vector<std::string>& expected,
                    const std::string& path) {
    if (f.header != expected)
        fail(path, ": expected header \"", join(expected), "\", got \"",
             join(f.header), "\"");
}

long long parse_int(const std::string& field) {
    long long value = 0;
    auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        fail("malformed integer \"", field, "\"");
    return value;
}

double parse_double(const std::string& field) {
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        fail("malformed number \"", field, "\"");
    return value;
}

} // namespace rgp::csv
