#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ltv::csv {

// shortest round-trip representation of a double
std::string fmt(double v);

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Reads a CSV with an expected header; returns data rows as string fields.
std::vector<std::vector<std::string>> read_rows(const std::string& path,
                                                const std::string& expected_header);

class Writer {
public:
    Writer(const std::string& path, const std::string& header) : out_(path) {
        if (!out_) throw std::runtime_error("io-failure: cannot open " + path);
        out_ << header << "\n";
    }
    template <typename... Ts>
    void row(const Ts&... fields) {
        bool first = true;
        ((out_ << (first ? "" : ","), first = false, write_field(fields)), ...);
        out_ << "\n";
    }
    void close() { out_.close(); }

private:
    void write_field(double v) { out_ << fmt(v); }
    void write_field(const std::string& s) { out_ << s; }
    void write_field(const char* s) { out_ << s; }
    template <typename T>
    void write_field(const T& v) { out_ << v; }
    std::ofstream out_;
};

}  // namespace ltv::csv
