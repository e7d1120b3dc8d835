#ifndef MINIDISK_CSV_HPP
#define MINIDISK_CSV_HPP

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace minidisk {

/// All floating-point output carries 17 significant digits.
inline std::string csv_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path);
        write_row(header);
    }

    void write_row(const std::vector<std::string>& cells) {
        for (size_t k = 0; k < cells.size(); ++k) {
            if (k) out_ << ',';
            out_ << cells[k];
        }
        out_ << '\n';
    }

    bool good() const { return out_.good(); }

private:
    std::ofstream out_;
};

}  // namespace minidisk

#endif
