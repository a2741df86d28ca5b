#pragma once

// Minimal RFC 4180 reader/writer: comma separator, double-quote quoting,
// "" as an escaped quote, CRLF or LF record terminators, embedded newlines
// inside quoted fields.

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lexdga/error.hpp"

namespace lexdga::csv {

struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0;  ///< 1-based physical line where the record starts
};

inline std::vector<Record> parse(std::string_view text) {
    std::vector<Record> records;
    Record current;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool record_has_content = false;
    std::size_t line = 1;
    current.line = 1;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        // A bare empty line is not a record.
        if (record_has_content) records.push_back(std::move(current));
        current = Record{};
        current.line = line;
        record_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty() || field_was_quoted)
                    throw DataError("csv: stray quote at line " + std::to_string(line));
                in_quotes = true;
                field_was_quoted = true;
                record_has_content = true;
                break;
            case ',':
                record_has_content = true;
                end_field();
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') break;
                [[fallthrough]];
            case '\n':
                ++line;
                end_record();
                break;
            default:
                if (field_was_quoted)
                    throw DataError("csv: text after closing quote at line " + std::to_string(line));
                field.push_back(c);
                record_has_content = true;
        }
    }
    if (in_quotes) throw DataError("csv: unterminated quoted field starting near line " + std::to_string(current.line));
    if (record_has_content || !field.empty()) end_record();
    return records;
}

inline std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

/// Fixed-point text with `digits` decimals.
inline std::string format_fixed(double value, int digits) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, digits);
    if (ec != std::errc{}) throw std::runtime_error("format_fixed failed");
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view text) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw DataError("not a number: '" + std::string(text) + "'");
    return value;
}

}  // namespace lexdga::csv
