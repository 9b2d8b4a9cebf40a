// SPDX-License-Identifier: Apache-2.0
//
// Minimal CSV emission with deterministic number formatting, so reruns of
// the same scenario are byte-identical. Comment lines (leading '#') carry
// definitions that do not fit a column name.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfuca {

inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline std::string csv_num(std::size_t v) { return std::to_string(v); }
inline std::string csv_num(int v) { return std::to_string(v); }

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::string>& comments = {}) {
        out_.open(path);
        if (!out_)
            throw std::runtime_error("cannot open output file " + path.string());
        for (const std::string& c : comments) out_ << "# " << c << "\n";
        write_cells(header);
    }

    void row(const std::vector<std::string>& cells) { write_cells(cells); }

private:
    void write_cells(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
};

}  // namespace qfuca
