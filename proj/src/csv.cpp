#include "gal/csv.hpp"

#include "gal/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace gal::csv {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string_view field = trim(line.substr(start, comma == std::string_view::npos
                                                             ? std::string_view::npos
                                                             : comma - start));
        if (field.size() >= 2 && field.front() == '"' && field.back() == '"')
            field = field.substr(1, field.size() - 2);
        out.emplace_back(field);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool to_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size() && std::isfinite(out);
}

double field_double(const std::vector<std::string>& fields, std::size_t col, std::size_t row,
                    std::string_view name) {
    double v = 0.0;
    if (!to_double(fields[col], v))
        throw RowError(row, fmt::format("unparsable {} '{}'", name, fields[col]));
    return v;
}

bool CsvReader::next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        fields = split_csv(line);
        ++row_;
        return true;
    }
    return false;
}

std::optional<std::size_t> Header::find(std::initializer_list<std::string_view> names) const {
    for (std::string_view n : names)
        if (auto it = columns.find(std::string(n)); it != columns.end()) return it->second;
    return std::nullopt;
}

std::size_t Header::need(std::initializer_list<std::string_view> names, std::string_view what) const {
    if (auto c = find(names)) return *c;
    fail(ErrorKind::format, fmt::format("missing required column '{}'", what));
}

Header read_header(std::istream& in, std::string_view what) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) fail(ErrorKind::format, fmt::format("{}: missing header row", what));
    Header h;
    const auto names = split_csv(line);
    for (std::size_t i = 0; i < names.size(); ++i) h.columns.emplace(lower(names[i]), i);
    return h;
}

std::string shortest(double v) { return fmt::format("{}", v); }

} // namespace gal::csv
