#include "damrl/hydro/reward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace damrl::hydro {

double flood_damage(WaterLevel h_max) {
    if (!std::isfinite(h_max.meters) || h_max.meters <= 0.0)
        throw std::domain_error("flood_damage: level must be positive");
    return std::exp(-981.0 + 170.0 * std::log(h_max.meters));
}

double rice_potential_raw(WaterLevel h) { return 0.1315 * h.meters - 43.121; }
double rice_potential(WaterLevel h) { return std::max(0.0, rice_potential_raw(h)); }

double wheat_potential_raw(WaterLevel h) { return 0.2642 * h.meters - 86.641; }
double wheat_potential(WaterLevel h) { return std::max(0.0, wheat_potential_raw(h)); }

double hydropower_potential_raw(WaterLevel h) { return 5.1927 * h.meters - 1342.5; }
double hydropower_potential(WaterLevel h) { return std::max(0.0, hydropower_potential_raw(h)); }

RewardBreakdown aggregate_reward(WaterLevel h, WaterLevel h_max14, bool in_dry_season,
                                 bool overflowed, const SimParams& params) {
    RewardBreakdown r;
    r.rice_raw = rice_potential_raw(h);
    r.wheat_raw = wheat_potential_raw(h);
    r.hydro_raw = hydropower_potential_raw(h);
    r.rice = rice_potential(h);
    r.wheat = wheat_potential(h);
    r.hydro = hydropower_potential(h);
    r.flood = flood_damage(h_max14);
    r.dam_break = overflowed ? params.dam_break_damage : 0.0;
    r.dry_season = in_dry_season;

    const double irrigation_scale = 1.0 / static_cast<double>(params.dry_season_day_count());
    r.total = params.power_potential_slope * r.hydro;
    if (in_dry_season)
        r.total += (params.rice_slope * r.rice + params.wheat_slope * r.wheat) * irrigation_scale;
    r.total -= params.flooded_area_slope * r.flood;
    r.total -= r.dam_break;
    return r;
}

} // namespace damrl::hydro
