#include "thinshell/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace thinshell {

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header_comments)
    : path_(path), os_(path) {
    if (!os_)
        throw std::runtime_error("cannot open output file: " + path);
    for (const auto& line : header_comments)
        os_ << "# " << line << '\n';
}

} // namespace thinshell
