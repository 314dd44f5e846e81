#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace gal {

/// Proleptic Gregorian calendar date, stored as days since 1970-01-01.
class Date {
public:
    constexpr Date() = default;

    static Date from_ymd(int year, unsigned month, unsigned day);
    static Date from_days(std::int64_t days) { Date d; d.days_ = days; return d; }

    /// Accepts "YYYY-MM-DD". Throws gal::Error(row) on malformed input.
    static Date parse(std::string_view text);

    std::int64_t days() const noexcept { return days_; }
    int year() const;
    unsigned month() const;
    unsigned day() const;

    std::string iso() const;       // YYYY-MM-DD
    std::string month_day() const; // MM-DD

    Date operator+(std::int64_t n) const { return from_days(days_ + n); }
    Date operator-(std::int64_t n) const { return from_days(days_ - n); }
    std::int64_t operator-(Date other) const { return days_ - other.days_; }
    Date& operator++() { ++days_; return *this; }

    friend constexpr auto operator<=>(Date, Date) = default;

private:
    std::int64_t days_ = 0;
};

} // namespace gal
