#pragma once

#include <compare>

namespace damrl::hydro {

/// Reservoir water level, meters above datum.
struct WaterLevel {
    double meters = 0.0;
    auto operator<=>(const WaterLevel&) const = default;
};

/// Stored volume, billion cubic meters.
struct StorageVolume {
    double bcm = 0.0;
    auto operator<=>(const StorageVolume&) const = default;
};

inline StorageVolume operator+(StorageVolume a, StorageVolume b) { return {a.bcm + b.bcm}; }
inline StorageVolume operator-(StorageVolume a, StorageVolume b) { return {a.bcm - b.bcm}; }

/// Release rate, cubic meters per second, held constant over one day.
struct Discharge {
    double cumecs = 0.0;
    auto operator<=>(const Discharge&) const = default;
};

/// Per-step reward components. rice/wheat/hydro are the clamped potential
/// values entering the total; the *_raw fields keep the unclamped affine
/// values for diagnostics. flood is the unweighted 14-day damage term and
/// dam_break the overflow penalty actually charged.
struct RewardBreakdown {
    double rice = 0.0;      // million tonnes
    double wheat = 0.0;     // million tonnes
    double hydro = 0.0;     // megawatts
    double flood = 0.0;     // damage units
    double dam_break = 0.0; // penalty units
    double rice_raw = 0.0;
    double wheat_raw = 0.0;
    double hydro_raw = 0.0;
    bool dry_season = false;
    double total = 0.0;
};

} // namespace damrl::hydro
