#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace damrl {

/// Calendar date (proleptic Gregorian), thin wrapper over std::chrono days.
class Date {
public:
    Date() = default;
    Date(int year, unsigned month, unsigned day);

    /// Days since 1970-01-01.
    static Date from_serial(int days);
    /// Parses "YYYY-MM-DD". Returns nullopt on malformed input.
    static std::optional<Date> parse(std::string_view iso);

    int serial() const { return serial_; }
    int year() const;
    unsigned month() const;
    unsigned day() const;

    Date plus_days(int n) const { return from_serial(serial_ + n); }
    Date next_day() const { return plus_days(1); }

    /// "YYYY-MM-DD"
    std::string to_string() const;

    auto operator<=>(const Date&) const = default;

private:
    int serial_ = 0;
};

inline int days_between(Date a, Date b) { return b.serial() - a.serial(); }

/// Month/day pair without a year (e.g. the water-year boundary "01 June").
struct MonthDay {
    unsigned month = 1;
    unsigned day = 1;
    bool operator==(const MonthDay&) const = default;
};

bool is_leap_year(int year);
unsigned days_in_month(int year, unsigned month);

/// Three-letter month name ("Jan".."Dec") to 1..12; 0 if unknown.
unsigned month_from_name(std::string_view name);
std::string_view month_short_name(unsigned month);

} // namespace damrl
