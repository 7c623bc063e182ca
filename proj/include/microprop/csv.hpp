#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace microprop::csv {

/// Decimal text with 17 significant digits (round-trips every double).
std::string format_double(double value);

/// Strict parse of the whole field; throws Errc::Io naming `what` on failure.
double parse_double(std::string_view text, std::string_view what = "number");
long long parse_int(std::string_view text, std::string_view what = "integer");
unsigned long long parse_uint(std::string_view text, std::string_view what = "integer");

/// Unquoted comma-separated fields. Fields must not contain ',' or newlines.
std::vector<std::string> split_line(std::string_view line);
std::string join_line(const std::vector<std::string>& fields);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws Errc::Io if absent.
  std::size_t column(std::string_view name) const;
};

/// Reads a headed CSV. Blank lines are skipped, CR before LF is tolerated,
/// and every row must have as many fields as the header.
Table read_table(const std::filesystem::path& path);

/// Writes with LF line endings. Throws Errc::Io on failure.
void write_table(const std::filesystem::path& path, const Table& table);

}  // namespace microprop::csv
