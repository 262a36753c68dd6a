#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cdrkit::csv {

// None of the pipeline's formats use quoting or embedded commas, so a plain
// comma split is the whole grammar.
inline void split(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t begin = 0;
    for (;;) {
        const std::size_t comma = line.find(',', begin);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(begin));
            return;
        }
        out.push_back(line.substr(begin, comma - begin));
        begin = comma + 1;
    }
}

inline std::optional<std::int64_t> parse_int(std::string_view field) {
    std::int64_t value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty()) return std::nullopt;
    return value;
}

inline std::optional<double> parse_double(std::string_view field) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty()) return std::nullopt;
    return value;
}

// Strips one trailing '\r' so CRLF files parse the same as LF files.
inline std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

}  // namespace cdrkit::csv
