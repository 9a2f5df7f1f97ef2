#pragma once

// CSV formatting with 12 significant digits and atomic file output.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace kurastab::io {

/// printf "%.12g".
std::string fmt(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(std::vector<std::string> cells);
    void add_numbers(const std::vector<double>& values);
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Splits comma-separated lines; the first row is the header.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Writes to a temporary sibling and renames it over the target.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace kurastab::io
