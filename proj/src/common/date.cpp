#include "damrl/common/date.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace damrl {

namespace {

namespace chr = std::chrono;

chr::year_month_day to_ymd(int serial) {
    return chr::year_month_day(chr::sys_days(chr::days(serial)));
}

} // namespace

Date::Date(int year, unsigned month, unsigned day) {
    chr::year_month_day ymd{chr::year(year), chr::month(month), chr::day(day)};
    serial_ = static_cast<int>(chr::sys_days(ymd).time_since_epoch().count());
}

Date Date::from_serial(int days) {
    Date d;
    d.serial_ = days;
    return d;
}

std::optional<Date> Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0, d = 0;
    auto num = [](std::string_view s, auto& out) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc() && p == s.data() + s.size();
    };
    if (!num(iso.substr(0, 4), y) || !num(iso.substr(5, 2), m) || !num(iso.substr(8, 2), d))
        return std::nullopt;
    chr::year_month_day ymd{chr::year(y), chr::month(m), chr::day(d)};
    if (!ymd.ok()) return std::nullopt;
    return Date(y, m, d);
}

int Date::year() const { return static_cast<int>(to_ymd(serial_).year()); }
unsigned Date::month() const { return static_cast<unsigned>(to_ymd(serial_).month()); }
unsigned Date::day() const { return static_cast<unsigned>(to_ymd(serial_).day()); }

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

bool is_leap_year(int year) {
    return chr::year(year).is_leap();
}

unsigned days_in_month(int year, unsigned month) {
    chr::year_month_day_last last{chr::year(year), chr::month_day_last(chr::month(month))};
    return static_cast<unsigned>(last.day());
}

unsigned month_from_name(std::string_view name) {
    static constexpr std::array<std::string_view, 12> names = {
        "Jan", "Feb", "Mar", "Apr", "May", "Jun",
        "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    if (name.size() < 3) return 0;
    for (unsigned i = 0; i < names.size(); ++i) {
        const auto n = names[i];
        if ((name[0] == n[0] || name[0] == n[0] + 32 || name[0] + 32 == n[0]) &&
            (name[1] | 32) == (n[1] | 32) && (name[2] | 32) == (n[2] | 32))
            return i + 1;
    }
    return 0;
}

std::string_view month_short_name(unsigned month) {
    static constexpr std::array<std::string_view, 12> names = {
        "Jan", "Feb", "Mar", "Apr", "May", "Jun",
        "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    return (month >= 1 && month <= 12) ? names[month - 1] : std::string_view{};
}

} // namespace damrl
