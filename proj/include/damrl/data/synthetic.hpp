#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "damrl/data/records.hpp"
#include "damrl/hydro/sim_params.hpp"

namespace damrl::data {

/// Daily rainfall intensity for one calendar month: a wet day occurs with
/// `wet_probability` and then draws Gamma(shape, scale) millimetres.
struct MonthIntensity {
    double wet_probability = 0.0;
    double gamma_shape = 1.0;
    double gamma_scale_mm = 1.0;
};

/// Controls for the synthetic gauge generator. Rainfall is a seasonal mixture
/// process; inflow is a lagged-runoff transform of rainfall with optional
/// slow drift in the runoff coefficient (so filtering models that track
/// coefficients have something real to track); levels are integrated through
/// the stage-storage curve under the baseline discharge schedule.
struct SyntheticConfig {
    std::uint64_t seed = 0;
    int start_year = 2012;
    int years = 8;
    std::array<MonthIntensity, 12> month{}; // index 0 = January
    std::vector<unsigned> monsoon_months = {6, 7, 8, 9};

    double catchment_bcm_per_mm = 0.010; // basin rainfall volume per mm of gauge rain
    double runoff_start = 0.30;          // fraction of rain volume reaching the dam
    double runoff_end = 0.30;            // linearly drifted across the whole span
    std::vector<double> lag_kernel = {0.35, 0.30, 0.20, 0.10, 0.05};
    double noise_rho = 0.5;   // AR(1) on the multiplicative inflow disturbance
    double noise_sigma = 0.1; // stationary std of that disturbance

    double initial_level_m = 330.0;
    hydro::SimParams params; // curve, capacity and dead storage for integration

    /// Monsoon-dominated preset (wet Jun-Sep, ~1300 mm/yr, ~4 BCM inflow/yr).
    static SyntheticConfig monsoon_preset(std::uint64_t seed, int start_year, int years);

    void validate() const;
};

/// Generate `years` full calendar years of daily records starting Jan 01 of
/// start_year. All three observation columns are populated. Deterministic in
/// the config (bitwise reproducible for a fixed seed).
std::vector<DailyRecord> synthesize(const SyntheticConfig& config);

} // namespace damrl::data
