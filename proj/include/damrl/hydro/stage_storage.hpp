#pragma once

#include "damrl/hydro/types.hpp"

namespace damrl::hydro {

/// Affine stage-storage relation: storage = slope * level + intercept.
/// Queries outside the defined domain throw instead of extrapolating. The
/// domain spans from the zero-storage level up to twice the headroom between
/// that level and the full reservoir level.
class StageStorageCurve {
public:
    /// slope in BCM per meter (must be > 0), intercept in BCM, full reservoir
    /// level in meters (fixes the domain upper bound).
    StageStorageCurve(double slope, double intercept, double full_reservoir_level_m);

    /// The fitted Bansagar relation: storage = 0.3653 h - 119.78.
    static StageStorageCurve bansagar(double full_reservoir_level_m = 342.934);

    StorageVolume storage_from_level(WaterLevel h) const;
    WaterLevel level_from_storage(StorageVolume s) const;

    double slope() const { return slope_; }
    double intercept() const { return intercept_; }
    /// Zero-storage level (domain lower bound).
    WaterLevel domain_min() const { return {domain_min_}; }
    WaterLevel domain_max() const { return {domain_max_}; }
    bool in_domain(WaterLevel h) const {
        return h.meters >= domain_min_ && h.meters <= domain_max_;
    }

private:
    double slope_;
    double intercept_;
    double domain_min_;
    double domain_max_;
};

/// Volume released by a constant discharge held for one day: a * 86400 / 1e9 BCM.
StorageVolume discharge_to_volume(Discharge a);

/// Inverse of discharge_to_volume.
Discharge volume_to_discharge(StorageVolume v);

} // namespace damrl::hydro
