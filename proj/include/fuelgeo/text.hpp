#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fuelgeo {

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string_view> split(std::string_view s, char delim);
/// Splits on LF, dropping a trailing CR from each line.
std::vector<std::string_view> split_lines(std::string_view s);
std::optional<double> parse_double(std::string_view s) noexcept;

/// Shortest decimal form that round-trips.
std::string format_number(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column position, or nullopt when absent.
    std::optional<std::size_t> column(std::string_view name) const;
    std::size_t require_column(std::string_view name) const;
};

/// RFC 4180-style reader: quoted fields may hold commas, quotes, newlines.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

std::string csv_escape(std::string_view field);

} // namespace fuelgeo
