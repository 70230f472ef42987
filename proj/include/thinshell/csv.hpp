#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace thinshell {

// Fixed 17-significant-digit formatting so identical runs produce
// byte-identical files.
std::string csv_num(double v);

// CSV file with '#'-prefixed metadata header lines.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header_comments);

    std::ofstream& stream() { return os_; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream os_;
};

} // namespace thinshell
