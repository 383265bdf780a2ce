#pragma once

// Field-level CSV helpers shared by the readers in this library.

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ineq/errors.hpp"

namespace ineq::detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

inline std::string row_context(std::size_t row, std::size_t line) {
    return "row " + std::to_string(row) + " (line " + std::to_string(line) + ")";
}

inline double parse_double(std::string_view field, std::string_view column, std::size_t row, std::size_t line) {
    double v = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (!field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (field.empty() || ec != std::errc() || ptr != last) {
        throw ValidationError("parse error at " + row_context(row, line) + ": column '" +
                              std::string(column) + "' is not a number: '" + std::string(field) + "'");
    }
    return v;
}

inline std::int64_t parse_int(std::string_view field, std::string_view column, std::size_t row, std::size_t line) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw ValidationError("parse error at " + row_context(row, line) + ": column '" +
                              std::string(column) + "' is not an integer: '" + std::string(field) + "'");
    }
    return v;
}

}  // namespace ineq::detail
