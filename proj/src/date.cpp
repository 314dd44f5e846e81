#include "gal/date.hpp"

#include "gal/error.hpp"

#include <charconv>
#include <fmt/format.h>

namespace gal {

namespace {

// Howard Hinnant's civil-calendar algorithms.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
    std::int64_t y;
    unsigned m;
    unsigned d;
};

Civil civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {y + (m <= 2), m, d};
}

bool leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr unsigned table[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && leap(y) ? 29 : table[m - 1];
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

} // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month))
        fail(ErrorKind::row, fmt::format("invalid calendar date {}-{}-{}", year, month, day));
    return from_days(days_from_civil(year, month, day));
}

Date Date::parse(std::string_view text) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_int(text.substr(0, 4), y) ||
        !parse_int(text.substr(5, 2), m) || !parse_int(text.substr(8, 2), d))
        fail(ErrorKind::row, fmt::format("malformed date '{}', expected YYYY-MM-DD", text));
    return from_ymd(y, m, d);
}

int Date::year() const { return static_cast<int>(civil_from_days(days_).y); }
unsigned Date::month() const { return civil_from_days(days_).m; }
unsigned Date::day() const { return civil_from_days(days_).d; }

std::string Date::iso() const {
    const Civil c = civil_from_days(days_);
    return fmt::format("{:04d}-{:02d}-{:02d}", c.y, c.m, c.d);
}

std::string Date::month_day() const {
    const Civil c = civil_from_days(days_);
    return fmt::format("{:02d}-{:02d}", c.m, c.d);
}

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::format: return "format";
    case ErrorKind::row: return "row";
    case ErrorKind::conflict: return "conflict";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::unit: return "unit";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::schema: return "schema";
    case ErrorKind::runtime: return "runtime";
    }
    return "unknown";
}

} // namespace gal
