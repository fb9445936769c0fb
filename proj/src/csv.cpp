#include "ltv/csv.hpp"

#include <charconv>

namespace ltv::csv {

std::string fmt(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

std::vector<std::vector<std::string>> read_rows(const std::string& path,
                                                const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("io-failure: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("io-failure: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_header)
        throw std::runtime_error("io-failure: bad header in " + path + " (got '" + line +
                                 "', want '" + expected_header + "')");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split_line(line));
    }
    return rows;
}

}  // namespace ltv::csv
