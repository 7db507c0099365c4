#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace robustbo {

/// Shortest decimal that round-trips to the same double; "nan", "inf", "-inf" otherwise.
std::string format_double(double v);

/// Comma split with surrounding blanks (and a trailing CR) removed from each field.
std::vector<std::string_view> split_fields(std::string_view line);

/// Whole-field parse; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

/// Reads a comma-separated file with a header line. Blank lines are skipped.
CsvTable read_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace robustbo
