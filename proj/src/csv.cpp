#include "mfnet/csv.hpp"

#include "mfnet/error.hpp"

#include <charconv>
#include <system_error>

namespace mfnet::csv {

std::vector<std::string> split(std::string_view line)
{
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else if (ch != '\r') {
            current.push_back(ch);
        }
    }
    if (quoted)
        throw Error("unterminated quoted field");
    fields.push_back(std::move(current));
    return fields;
}

std::string escape(std::string_view field)
{
    if (field.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"')
            out += "\"\"";
        else
            out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

std::string join(const std::vector<std::string> &fields)
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out.push_back(',');
        out += escape(fields[i]);
    }
    return out;
}

Table Table::read(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());

    Table table;
    table.source_ = path.string();
    std::string line;
    std::size_t number = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty() || line == "\r" || line.front() == '#')
            continue;
        std::vector<std::string> fields;
        try {
            fields = split(line);
        } catch (const Error &e) {
            throw ParseError(table.source_, number, e.what());
        }
        if (!have_header) {
            table.header_ = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header_.size())
            throw ParseError(table.source_, number,
                             "expected " + std::to_string(table.header_.size()) + " fields, got " +
                                 std::to_string(fields.size()));
        table.rows_.push_back(Row{number, std::move(fields)});
    }
    if (!have_header)
        throw ParseError(table.source_, 1, "missing header row");
    return table;
}

std::size_t Table::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name)
            return i;
    throw ParseError(source_, 1, "missing column '" + std::string(name) + "'");
}

std::ofstream open_output(const std::filesystem::path &path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write " + path.string());
    return out;
}

std::string format_double(double value)
{
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc())
        throw Error("cannot format number");
    return std::string(buffer, end);
}

} // namespace mfnet::csv
