#include "damrl/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "damrl/common/rng.hpp"
#include "damrl/policy/schedule.hpp"

namespace damrl::data {

SyntheticConfig SyntheticConfig::monsoon_preset(std::uint64_t seed, int start_year, int years) {
    SyntheticConfig cfg;
    cfg.seed = seed;
    cfg.start_year = start_year;
    cfg.years = years;
    // index 0 = January.
    cfg.month = {{
        {0.06, 1.0, 4.0},  // Jan
        {0.06, 1.0, 4.0},  // Feb
        {0.05, 1.0, 4.0},  // Mar
        {0.05, 1.0, 5.0},  // Apr
        {0.08, 1.0, 6.0},  // May
        {0.45, 1.2, 9.0},  // Jun
        {0.80, 1.5, 12.0}, // Jul
        {0.80, 1.5, 11.0}, // Aug
        {0.60, 1.3, 10.0}, // Sep
        {0.25, 1.1, 7.0},  // Oct
        {0.06, 1.0, 4.0},  // Nov
        {0.05, 1.0, 4.0},  // Dec
    }};
    return cfg;
}

void SyntheticConfig::validate() const {
    if (years < 1) throw std::invalid_argument("synthetic: years must be >= 1");
    if (lag_kernel.empty()) throw std::invalid_argument("synthetic: empty lag kernel");
    double kernel_sum = 0.0;
    for (double w : lag_kernel) {
        if (w < 0.0) throw std::invalid_argument("synthetic: negative lag kernel weight");
        kernel_sum += w;
    }
    if (kernel_sum <= 0.0) throw std::invalid_argument("synthetic: lag kernel sums to zero");
    for (const auto& m : month) {
        if (m.wet_probability < 0.0 || m.wet_probability > 1.0 || m.gamma_shape <= 0.0 ||
            m.gamma_scale_mm <= 0.0) {
            throw std::invalid_argument("synthetic: bad month intensity");
        }
    }
    if (catchment_bcm_per_mm <= 0.0) throw std::invalid_argument("synthetic: bad catchment scale");
    if (runoff_start <= 0.0 || runoff_end <= 0.0) {
        throw std::invalid_argument("synthetic: runoff coefficients must be positive");
    }
    if (noise_rho < 0.0 || noise_rho >= 1.0 || noise_sigma < 0.0) {
        throw std::invalid_argument("synthetic: bad noise parameters");
    }
    params.validate();
    const auto curve = params.curve();
    if (!curve.in_domain({initial_level_m})) {
        throw std::invalid_argument("synthetic: initial level outside the stage-storage domain");
    }
    for (unsigned m : monsoon_months) {
        if (m < 1 || m > 12) throw std::invalid_argument("synthetic: bad monsoon month");
    }
}

std::vector<DailyRecord> synthesize(const SyntheticConfig& config) {
    config.validate();
    RngStream rain_rng = derive_stream(config.seed, "synthetic.rain");
    RngStream noise_rng = derive_stream(config.seed, "synthetic.noise");

    const Date first(config.start_year, 1, 1);
    const Date last(config.start_year + config.years - 1, 12, 31);
    const long n_days = days_between(first, last) + 1;

    // Rainfall.
    std::vector<double> rainfall(static_cast<std::size_t>(n_days), 0.0);
    {
        Date d = first;
        for (long t = 0; t < n_days; ++t, d = d.plus_days(1)) {
            const auto& m = config.month[d.month() - 1];
            if (rain_rng.uniform() < m.wet_probability) {
                rainfall[static_cast<std::size_t>(t)] =
                    rain_rng.gamma(m.gamma_shape, m.gamma_scale_mm);
            }
        }
    }

    // Inflow: lagged runoff with a slowly drifting coefficient and
    // multiplicative AR(1) disturbance. Dry stretches stay exactly dry.
    std::vector<double> inflow(static_cast<std::size_t>(n_days), 0.0);
    {
        const double innovation_scale =
            config.noise_sigma * std::sqrt(std::max(0.0, 1.0 - config.noise_rho * config.noise_rho));
        double disturbance = 0.0;
        for (long t = 0; t < n_days; ++t) {
            disturbance = config.noise_rho * disturbance + innovation_scale * noise_rng.normal();
            const double frac = n_days > 1 ? static_cast<double>(t) / static_cast<double>(n_days - 1) : 0.0;
            const double runoff = config.runoff_start + frac * (config.runoff_end - config.runoff_start);
            double base = 0.0;
            for (std::size_t k = 0; k < config.lag_kernel.size(); ++k) {
                const long src = t - static_cast<long>(k);
                if (src < 0) break;
                base += config.lag_kernel[k] * rainfall[static_cast<std::size_t>(src)];
            }
            base *= config.catchment_bcm_per_mm * runoff;
            inflow[static_cast<std::size_t>(t)] = std::max(0.0, base * (1.0 + disturbance));
        }
    }

    // Levels: integrate storage under the baseline schedule; outside Nov-Jun
    // the operator passes inflow through (level-stable rule).
    const auto curve = config.params.curve();
    const double dead = config.params.dam_base_water.bcm;
    const double cap = curve.storage_from_level({config.params.dam_cap}).bcm;
    const auto& schedule = policy::baseline_schedule();

    std::vector<DailyRecord> out;
    out.reserve(static_cast<std::size_t>(n_days));
    double storage = curve.storage_from_level({config.initial_level_m}).bcm;
    Date d = first;
    for (long t = 0; t < n_days; ++t, d = d.plus_days(1)) {
        const double in_vol = inflow[static_cast<std::size_t>(t)];
        double target_release;
        if (auto q = policy::schedule_discharge(schedule, d)) {
            target_release = hydro::discharge_to_volume({*q}).bcm;
        } else {
            target_release = in_vol;
        }
        const double available = storage + in_vol - dead;
        const double released = std::clamp(target_release, 0.0, std::max(0.0, available));
        storage = storage + in_vol - released;
        if (storage > cap) storage = cap; // spill is not recorded in the gauge file
        DailyRecord rec;
        rec.date = d;
        rec.rainfall_mm = rainfall[static_cast<std::size_t>(t)];
        rec.water_level_m = curve.level_from_storage({storage}).meters;
        rec.inflow_bcm = in_vol;
        out.push_back(rec);
    }
    return out;
}

} // namespace damrl::data
