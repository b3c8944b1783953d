#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mfnet::csv {

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
// Throws mfnet::Error on an unterminated quote.
std::vector<std::string> split(std::string_view line);

// Quotes a field if it contains a comma, quote or newline.
std::string escape(std::string_view field);

// Joins already formatted fields with commas, escaping each.
std::string join(const std::vector<std::string> &fields);

struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

// Reads a headed CSV file. Blank lines and lines starting with '#' are skipped.
class Table {
  public:
    static Table read(const std::filesystem::path &path);

    const std::vector<std::string> &header() const { return header_; }
    const std::vector<Row> &rows() const { return rows_; }
    const std::string &source() const { return source_; }

    // Column position by name; throws ParseError (line 1) if missing.
    std::size_t column(std::string_view name) const;

  private:
    std::string source_;
    std::vector<std::string> header_;
    std::vector<Row> rows_;
};

// Opens a file for writing, creating parent directories. Throws on failure.
std::ofstream open_output(const std::filesystem::path &path);

// Shortest decimal form that round-trips a double.
std::string format_double(double value);

} // namespace mfnet::csv
