#pragma once

#include "damrl/hydro/sim_params.hpp"
#include "damrl/hydro/types.hpp"

namespace damrl::hydro {

/// Flood damage exp(-981) * h^170 for the 14-day maximum level. Evaluated in
/// log space; the direct power overflows a double for any realistic level.
double flood_damage(WaterLevel h_max);

/// Potential rice productivity 0.1315 h - 43.121, clamped at zero (million tonnes).
double rice_potential(WaterLevel h);
double rice_potential_raw(WaterLevel h);

/// Potential wheat productivity 0.2642 h - 86.641, clamped at zero (million tonnes).
double wheat_potential(WaterLevel h);
double wheat_potential_raw(WaterLevel h);

/// Hydropower potential 5.1927 h - 1342.5, clamped at zero (megawatts).
double hydropower_potential(WaterLevel h);
double hydropower_potential_raw(WaterLevel h);

/// Combines the component models into the scalar step reward:
///   total = power_potential_slope * hydro
///         + [dry] * (rice_slope * rice + wheat_slope * wheat) / dry_season_days
///         - flooded_area_slope * flood_damage(h_max14)
///         - [overflowed] * dam_break_damage
/// Irrigation accrues daily at 1/(dry-season days) so a full season at a
/// steady level counts each potential once.
RewardBreakdown aggregate_reward(WaterLevel h, WaterLevel h_max14, bool in_dry_season,
                                 bool overflowed, const SimParams& params);

} // namespace damrl::hydro
