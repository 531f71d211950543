#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wifitrack {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest text that parses back to exactly the same double.
std::string format_double(double v);
/// Fixed-point with the given number of decimals ("%.*f").
std::string format_fixed(double v, int decimals);

/// Quotes a CSV field only when it contains a separator, quote or newline.
std::string csv_escape(std::string_view field);

/// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> parse_csv_line(std::string_view line);

std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

/// Line-oriented CSV writer; every row must match the header width.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);
    void row(const std::vector<std::string>& fields);
    void close();

private:
    std::ofstream out_;
    std::size_t width_;
    std::filesystem::path path_;
};

/// Whole-file CSV reader with header-name column lookup.
class CsvTable {
public:
    static CsvTable read(const std::filesystem::path& path);

    std::size_t column(std::string_view name) const;
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    const std::vector<std::string>& header() const { return header_; }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::filesystem::path path_;
};

double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);

}  // namespace wifitrack
