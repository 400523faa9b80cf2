#include "damrl/hydro/stage_storage.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace damrl::hydro {

StageStorageCurve::StageStorageCurve(double slope, double intercept, double full_reservoir_level_m)
    : slope_(slope), intercept_(intercept) {
    if (!(slope > 0.0) || !std::isfinite(slope) || !std::isfinite(intercept))
        throw std::invalid_argument("stage-storage curve: slope must be finite and positive");
    domain_min_ = -intercept / slope;
    if (!(full_reservoir_level_m > domain_min_))
        throw std::invalid_argument("stage-storage curve: full reservoir level below zero-storage level");
    domain_max_ = domain_min_ + 2.0 * (full_reservoir_level_m - domain_min_);
}

StageStorageCurve StageStorageCurve::bansagar(double full_reservoir_level_m) {
    return StageStorageCurve(0.3653, -119.78, full_reservoir_level_m);
}

StorageVolume StageStorageCurve::storage_from_level(WaterLevel h) const {
    if (!std::isfinite(h.meters))
        throw std::invalid_argument("storage_from_level: non-finite level");
    if (!in_domain(h))
        throw std::domain_error("storage_from_level: level " + std::to_string(h.meters) +
                                " m outside curve domain [" + std::to_string(domain_min_) + ", " +
                                std::to_string(domain_max_) + "]");
    return {slope_ * h.meters + intercept_};
}

WaterLevel StageStorageCurve::level_from_storage(StorageVolume s) const {
    if (!std::isfinite(s.bcm))
        throw std::invalid_argument("level_from_storage: non-finite storage");
    if (s.bcm < 0.0)
        throw std::domain_error("level_from_storage: negative storage " + std::to_string(s.bcm));
    const WaterLevel h{(s.bcm - intercept_) / slope_};
    if (h.meters > domain_max_)
        throw std::domain_error("level_from_storage: storage " + std::to_string(s.bcm) +
                                " BCM above curve domain");
    return h;
}

StorageVolume discharge_to_volume(Discharge a) {
    if (!std::isfinite(a.cumecs) || a.cumecs < 0.0)
        throw std::invalid_argument("discharge_to_volume: discharge must be finite and non-negative");
    return {a.cumecs * 86400.0 / 1e9};
}

Discharge volume_to_discharge(StorageVolume v) {
    if (!std::isfinite(v.bcm) || v.bcm < 0.0)
        throw std::invalid_argument("volume_to_discharge: volume must be finite and non-negative");
    return {v.bcm * 1e9 / 86400.0};
}

} // namespace damrl::hydro
