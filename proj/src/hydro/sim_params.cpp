#include "damrl/hydro/sim_params.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace damrl::hydro {

namespace {

// Accepts "01 June", "June 01" or "06-01".
MonthDay parse_month_day(const std::string& text) {
    unsigned month = 0, day = 0;
    if (text.size() >= 5 && text[2] == '-' &&
        std::isdigit(static_cast<unsigned char>(text[0]))) {
        month = static_cast<unsigned>(std::stoul(text.substr(0, 2)));
        day = static_cast<unsigned>(std::stoul(text.substr(3)));
    } else {
        const auto space = text.find(' ');
        if (space == std::string::npos)
            throw std::invalid_argument("cannot parse month/day: " + text);
        const std::string a = text.substr(0, space);
        const std::string b = text.substr(space + 1);
        if (std::isdigit(static_cast<unsigned char>(a[0]))) {
            day = static_cast<unsigned>(std::stoul(a));
            month = month_from_name(b);
        } else {
            month = month_from_name(a);
            day = static_cast<unsigned>(std::stoul(b));
        }
    }
    if (month < 1 || month > 12 || day < 1 || day > 31)
        throw std::invalid_argument("cannot parse month/day: " + text);
    return {month, day};
}

std::string format_month_day(MonthDay md) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02u %s", md.day, std::string(month_short_name(md.month)).c_str());
    return buf;
}

MonthRange parse_month_range(const std::string& text) {
    const auto dash = text.find('-');
    if (dash == std::string::npos)
        throw std::invalid_argument("cannot parse month range: " + text);
    const unsigned first = month_from_name(text.substr(0, dash));
    const unsigned last = month_from_name(text.substr(dash + 1));
    if (first == 0 || last == 0)
        throw std::invalid_argument("cannot parse month range: " + text);
    return {first, last};
}

std::string format_month_range(MonthRange r) {
    return std::string(month_short_name(r.first)) + "-" + std::string(month_short_name(r.last));
}

} // namespace

void SimParams::validate() const {
    if (!(discount > 0.0 && discount < 1.0))
        throw std::invalid_argument("sim params: discount must lie in (0,1)");
    if (max_step < 1)
        throw std::invalid_argument("sim params: max_step must be >= 1");
    if (flooded_area_slope < 0.0 || power_potential_slope < 0.0 ||
        wheat_slope < 0.0 || rice_slope < 0.0)
        throw std::invalid_argument("sim params: slopes must be non-negative");
    if (!(a_max.cumecs > 0.0))
        throw std::invalid_argument("sim params: a_max must be positive");
    if (flood_window < 1 || rainfall_window < 1)
        throw std::invalid_argument("sim params: windows must be >= 1");
    const auto c = curve();
    if (!(dam_base_water.bcm >= 0.0) ||
        dam_base_water.bcm >= c.storage_from_level(dam_cap).bcm)
        throw std::invalid_argument("sim params: dam_base_water must lie below storage at dam_cap");
}

int SimParams::dry_season_day_count() const {
    // Non-leap reference year: the reward aggregation has no calendar year.
    int days = 0;
    for (unsigned m = 1; m <= 12; ++m)
        if (dry_season.contains(m)) days += static_cast<int>(days_in_month(2001, m));
    return days;
}

SimParams SimParams::from_config(const KeyValueConfig& cfg) {
    SimParams p;
    p.dam_cap.meters = cfg.get_real("dam_cap", p.dam_cap.meters);
    p.dam_break_damage = cfg.get_real("dam_break_damage", p.dam_break_damage);
    p.dam_base_water.bcm = cfg.get_real("dam_base_water", p.dam_base_water.bcm);
    if (cfg.has("water_year_start")) p.water_year_start = parse_month_day(cfg.get_string("water_year_start"));
    if (cfg.has("water_year_end")) p.water_year_end = parse_month_day(cfg.get_string("water_year_end"));
    if (cfg.has("dry_season_months")) p.dry_season = parse_month_range(cfg.get_string("dry_season_months"));
    p.discount = cfg.get_real("discount", p.discount);
    p.max_step = static_cast<int>(cfg.get_int("max_step", p.max_step));
    p.flooded_area_slope = cfg.get_real("flooded_area_slope", p.flooded_area_slope);
    p.power_potential_slope = cfg.get_real("power_potential_slope", p.power_potential_slope);
    p.wheat_slope = cfg.get_real("wheat_slope", p.wheat_slope);
    p.rice_slope = cfg.get_real("rice_slope", p.rice_slope);
    p.a_max.cumecs = cfg.get_real("a_max", p.a_max.cumecs);
    p.flood_window = static_cast<int>(cfg.get_int("flood_window", p.flood_window));
    p.rainfall_window = static_cast<int>(cfg.get_int("rainfall_window", p.rainfall_window));
    p.validate();
    return p;
}

void SimParams::to_config(KeyValueConfig& cfg) const {
    cfg.set_real("dam_cap", dam_cap.meters);
    cfg.set_real("dam_break_damage", dam_break_damage);
    cfg.set_real("dam_base_water", dam_base_water.bcm);
    cfg.set("water_year_start", format_month_day(water_year_start));
    cfg.set("water_year_end", format_month_day(water_year_end));
    cfg.set("dry_season_months", format_month_range(dry_season));
    cfg.set_real("discount", discount);
    cfg.set_int("max_step", max_step);
    cfg.set_real("flooded_area_slope", flooded_area_slope);
    cfg.set_real("power_potential_slope", power_potential_slope);
    cfg.set_real("wheat_slope", wheat_slope);
    cfg.set_real("rice_slope", rice_slope);
    cfg.set_real("a_max", a_max.cumecs);
    cfg.set_int("flood_window", flood_window);
    cfg.set_int("rainfall_window", rainfall_window);
}

} // namespace damrl::hydro
