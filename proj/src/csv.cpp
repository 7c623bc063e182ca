#include "microprop/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "microprop/error.hpp"

namespace microprop::csv {

std::string format_double(double value) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

namespace {

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw Error(Errc::Io, "cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  return value;
}

}  // namespace

double parse_double(std::string_view text, std::string_view what) { return parse_number<double>(text, what); }
long long parse_int(std::string_view text, std::string_view what) { return parse_number<long long>(text, what); }
unsigned long long parse_uint(std::string_view text, std::string_view what) {
  return parse_number<unsigned long long>(text, what);
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string join_line(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].find_first_of(",\n\r") != std::string::npos)
      throw Error(Errc::InvalidArgument, "CSV field contains a separator: " + fields[i]);
    if (i > 0) line += ',';
    line += fields[i];
  }
  return line;
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error(Errc::Io, "missing CSV column '" + std::string(name) + "'");
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  Table table;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size())
      throw Error(Errc::Io, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                std::to_string(table.header.size()) + " fields, got " + std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw Error(Errc::Io, path.string() + ": missing header");
  return table;
}

void write_table(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << join_line(table.header) << '\n';
  for (const auto& row : table.rows) out << join_line(row) << '\n';
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

}  // namespace microprop::csv
