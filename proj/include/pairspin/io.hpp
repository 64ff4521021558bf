#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pairspin {

// CSV: one header row, '.' decimal separator, locale-independent via snprintf.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path);
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }

    void row(const std::vector<double>& values) {
        char buf[40];
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", values[i]);
            out_ << (i ? "," : "") << buf;
        }
        out_ << "\n";
    }

    void row_mixed(const std::vector<std::string>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << values[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

inline std::string format_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace pairspin
