#include "damrl/env/environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace damrl::env {

namespace {

long index_for(const std::vector<data::DailyRecord>& records, long first_serial, Date date) {
    const long idx = date.serial() - first_serial;
    if (idx < 0 || idx >= static_cast<long>(records.size())) return -1;
    // Daily records are strictly increasing but may have gaps; verify.
    if (records[static_cast<std::size_t>(idx)].date.serial() == date.serial()) return idx;
    // Fall back to binary search for gapped series.
    auto it = std::lower_bound(records.begin(), records.end(), date,
                               [](const data::DailyRecord& r, Date d) { return r.date < d; });
    if (it != records.end() && !(date < it->date)) return it - records.begin();
    return -1;
}

std::shared_ptr<const std::vector<data::DailyRecord>>
require_records(std::shared_ptr<const std::vector<data::DailyRecord>> records, const char* who) {
    if (!records || records->empty()) {
        throw std::invalid_argument(std::string(who) + ": empty record set");
    }
    return records;
}

} // namespace

ReplayRainfall::ReplayRainfall(std::shared_ptr<const std::vector<data::DailyRecord>> records)
    : records_(require_records(std::move(records), "ReplayRainfall")),
      first_serial_(records_->front().date.serial()) {}

double ReplayRainfall::rainfall_mm(Date date, RngStream&) const {
    const long idx = index_for(*records_, first_serial_, date);
    if (idx < 0) {
        throw std::runtime_error("replay rainfall has no record for " + date.to_string());
    }
    return (*records_)[static_cast<std::size_t>(idx)].rainfall_mm;
}

std::optional<double> ReplayRainfall::historical_rainfall(Date date) const {
    const long idx = index_for(*records_, first_serial_, date);
    if (idx < 0) return std::nullopt;
    return (*records_)[static_cast<std::size_t>(idx)].rainfall_mm;
}

BootstrapRainfall::BootstrapRainfall(std::shared_ptr<const std::vector<data::DailyRecord>> records)
    : records_(require_records(std::move(records), "BootstrapRainfall")),
      by_month_day_(12 * 31),
      first_serial_(records_->front().date.serial()) {
    for (const auto& r : *records_) {
        by_month_day_[(r.date.month() - 1) * 31 + (r.date.day() - 1)].push_back(r.rainfall_mm);
    }
}

double BootstrapRainfall::rainfall_mm(Date date, RngStream& rng) const {
    const auto& pool = by_month_day_[(date.month() - 1) * 31 + (date.day() - 1)];
    if (pool.empty()) {
        throw std::runtime_error("bootstrap rainfall has no records for calendar day " +
                                 date.to_string());
    }
    return pool[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(pool.size())))];
}

std::optional<double> BootstrapRainfall::historical_rainfall(Date date) const {
    const long idx = index_for(*records_, first_serial_, date);
    if (idx < 0) return std::nullopt;
    return (*records_)[static_cast<std::size_t>(idx)].rainfall_mm;
}

ModelInflow::ModelInflow(std::shared_ptr<const inflow::FittedInflowModel> model)
    : model_(std::move(model)) {
    if (!model_) throw std::invalid_argument("ModelInflow: null model");
    if (model_->kind == inflow::InflowModelKind::REPLAY) {
        throw std::invalid_argument("ModelInflow: replay models need ReplayInflow");
    }
}

double ModelInflow::inflow_bcm(Date, double rf_today_mm,
                               const std::vector<double>& window_mm) const {
    return model_->predict_bcm(rf_today_mm, window_mm);
}

ReplayInflow::ReplayInflow(std::shared_ptr<const std::vector<data::DailyRecord>> records)
    : records_(require_records(std::move(records), "ReplayInflow")),
      first_serial_(records_->front().date.serial()) {}

double ReplayInflow::inflow_bcm(Date date, double, const std::vector<double>&) const {
    const long idx = index_for(*records_, first_serial_, date);
    if (idx < 0) throw std::runtime_error("replay inflow has no record for " + date.to_string());
    const auto& rec = (*records_)[static_cast<std::size_t>(idx)];
    if (!rec.inflow_bcm) {
        throw std::runtime_error("replay inflow record for " + date.to_string() +
                                 " has no inflow value");
    }
    return *rec.inflow_bcm;
}

void EpisodeConfig::validate() const {
    params.validate();
    if (!inflow) throw std::invalid_argument("episode config: missing inflow source");
    if (!rainfall) throw std::invalid_argument("episode config: missing rainfall source");
    const auto curve = params.curve();
    if (!curve.in_domain(initial_level)) {
        throw std::invalid_argument("episode config: initial level " +
                                    std::to_string(initial_level.meters) +
                                    " m is outside the stage-storage domain");
    }
    if (curve.storage_from_level(initial_level).bcm < params.dam_base_water.bcm) {
        throw std::invalid_argument("episode config: initial storage below dead storage");
    }
}

bool is_dry_season(Date date, const hydro::SimParams& params) {
    return params.dry_season.contains(date.month());
}

int day_of_water_year(Date date, const hydro::SimParams& params) {
    Date start(date.year(), params.water_year_start.month, params.water_year_start.day);
    if (date < start) {
        start = Date(date.year() - 1, params.water_year_start.month, params.water_year_start.day);
    }
    return static_cast<int>(days_between(start, date));
}

Environment::Environment(EpisodeConfig config) : config_(std::move(config)) {
    config_.validate();
}

const EnvState& Environment::reset() {
    rng_ = derive_stream(config_.seed, "env");
    state_ = EnvState{};
    state_.level = config_.initial_level;
    state_.date = config_.start_date;
    state_.day_index = 0;
    state_.rainfall_window.assign(static_cast<std::size_t>(config_.params.rainfall_window), 0.0);
    for (int j = 1; j <= config_.params.rainfall_window; ++j) {
        const auto rf = config_.rainfall->historical_rainfall(config_.start_date.plus_days(-j));
        state_.rainfall_window[static_cast<std::size_t>(j - 1)] = rf.value_or(0.0);
    }
    state_.level_window14.assign(static_cast<std::size_t>(config_.params.flood_window),
                                 config_.initial_level.meters);
    ready_ = true;
    done_ = false;
    return state_;
}

const EnvState& Environment::state() const {
    if (!ready_) throw std::logic_error("environment: state() before reset()");
    return state_;
}

StepOutcome Environment::step(const Action& action) {
    if (!ready_) throw std::logic_error("environment: step() before reset()");
    if (done_) throw std::logic_error("environment: step() after the episode ended");
    if (!std::isfinite(action.discharge.cumecs)) {
        throw std::invalid_argument("environment: non-finite action");
    }
    const auto& params = config_.params;
    const auto curve = params.curve();

    const double rf = config_.rainfall->rainfall_mm(state_.date, rng_);
    if (!std::isfinite(rf) || rf < 0.0) {
        throw std::runtime_error("environment: bad rainfall value on " + state_.date.to_string());
    }
    const double raw_inflow = config_.inflow->inflow_bcm(state_.date, rf, state_.rainfall_window);
    if (!std::isfinite(raw_inflow)) {
        throw std::runtime_error("environment: non-finite inflow on " + state_.date.to_string());
    }
    const double inflow = std::max(0.0, raw_inflow);

    const hydro::Discharge applied{
        std::clamp(action.discharge.cumecs, 0.0, params.a_max.cumecs)};
    const double storage = curve.storage_from_level(state_.level).bcm;
    const double requested = hydro::discharge_to_volume(applied).bcm;
    const double available = std::max(0.0, storage + inflow - params.dam_base_water.bcm);
    const double released = std::min(requested, available);

    double next_storage = storage + inflow - released;
    const double cap = curve.storage_from_level(params.dam_cap).bcm;
    double spilled = 0.0;
    bool overflowed = false;
    if (next_storage > cap) {
        spilled = next_storage - cap;
        next_storage = cap;
        overflowed = true;
    }
    const hydro::WaterLevel next_level = curve.level_from_storage({next_storage});

    StepOutcome out;
    out.next_state.level = next_level;
    out.next_state.rainfall_window.reserve(state_.rainfall_window.size());
    out.next_state.rainfall_window.push_back(rf);
    out.next_state.rainfall_window.insert(out.next_state.rainfall_window.end(),
                                          state_.rainfall_window.begin(),
                                          state_.rainfall_window.end() - 1);
    out.next_state.level_window14.assign(state_.level_window14.begin() + 1,
                                         state_.level_window14.end());
    out.next_state.level_window14.push_back(next_level.meters);
    out.next_state.day_index = state_.day_index + 1;
    out.next_state.date = state_.date.plus_days(1);

    const double h_max14 =
        *std::max_element(out.next_state.level_window14.begin(), out.next_state.level_window14.end());
    out.reward = hydro::aggregate_reward(next_level, {h_max14}, is_dry_season(state_.date, params),
                                         overflowed, params);
    if (!std::isfinite(out.reward.total)) {
        throw std::runtime_error("environment: non-finite reward on " + state_.date.to_string());
    }
    out.inflow = {inflow};
    out.released = {released};
    out.spilled = {spilled};
    out.overflowed = overflowed;
    out.rainfall_mm = rf;
    out.applied = applied;
    out.done = out.next_state.day_index == params.max_step;

    state_ = out.next_state;
    done_ = out.done;
    return out;
}

} // namespace damrl::env
