#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "thermograph/util.hpp"

namespace thermograph {

/**
 * Minimal RFC-4180-style CSV writer: '.' decimal separator, 17 significant
 * digits for reals, a header row naming the columns, and a trailing
 * config_hash column carrying the hash of the canonical config string.
 */
class CsvWriter {
public:
    CsvWriter(std::vector<std::string> columns, const std::string& config)
        : columns_(std::move(columns)) {
        char buf[20];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a(config)));
        hash_ = buf;
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_.size())
            throw ConfigError("csv row width mismatch");
        rows_.push_back(cells);
    }

    static std::string num(double x) { return fmt17(x); }
    static std::string num(long long x) { return std::to_string(x); }
    static std::string num(int x) { return std::to_string(x); }

    std::string str() const {
        std::ostringstream os;
        for (size_t i = 0; i < columns_.size(); ++i) os << columns_[i] << ",";
        os << "config_hash\r\n";
        for (const auto& r : rows_) {
            for (const auto& c : r) os << c << ",";
            os << hash_ << "\r\n";
        }
        return os.str();
    }

    void write(const std::string& path) const {
        if (path.empty() || path == "-") {
            std::cout << str();
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot open output file '" + path + "'");
        f << str();
    }

private:
    std::vector<std::string> columns_;
    std::string hash_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace thermograph
