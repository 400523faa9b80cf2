#pragma once

#include "damrl/common/config.hpp"
#include "damrl/common/date.hpp"
#include "damrl/hydro/stage_storage.hpp"
#include "damrl/hydro/types.hpp"

namespace damrl::hydro {

/// Month range that may wrap around the new year (Nov-Jun).
struct MonthRange {
    unsigned first = 1;
    unsigned last = 12;
    bool contains(unsigned month) const {
        return first <= last ? (month >= first && month <= last)
                             : (month >= first || month <= last);
    }
};

/// Simulator parameter set. Defaults follow the Bansagar calibration.
struct SimParams {
    WaterLevel dam_cap{342.934};
    double dam_break_damage = 80.0;
    StorageVolume dam_base_water{0.1};
    MonthDay water_year_start{6, 1};
    MonthDay water_year_end{5, 31};
    MonthRange dry_season{11, 6};
    double discount = 0.999;
    int max_step = 365;
    double flooded_area_slope = 0.00006;
    double power_potential_slope = 0.003;
    double wheat_slope = 30.0;
    double rice_slope = 30.0;
    Discharge a_max{3000.0};
    int flood_window = 14;
    int rainfall_window = 7;

    /// Throws std::invalid_argument when any invariant is violated.
    void validate() const;

    /// Stage-storage curve with the domain anchored at dam_cap.
    StageStorageCurve curve() const { return StageStorageCurve::bansagar(dam_cap.meters); }

    /// Number of dry-season days in a water year (non-leap reference year);
    /// normalizes the daily irrigation accrual.
    int dry_season_day_count() const;

    static SimParams from_config(const KeyValueConfig& cfg);
    void to_config(KeyValueConfig& cfg) const;
};

} // namespace damrl::hydro
