#include "damrl/policy/policies.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace damrl::policy {

env::Action baseline_act(const env::EnvState& state, hydro::StorageVolume inflow_estimate,
                         const hydro::SimParams& params,
                         const std::array<SchedulePeriod, 24>& table) {
    double cumecs;
    if (auto scheduled = schedule_discharge(table, state.date)) {
        cumecs = *scheduled;
    } else {
        cumecs = hydro::volume_to_discharge({std::max(0.0, inflow_estimate.bcm)}).cumecs;
    }
    return {hydro::Discharge{std::clamp(cumecs, 0.0, params.a_max.cumecs)}};
}

SchedulePolicy::SchedulePolicy(hydro::SimParams params, std::array<SchedulePeriod, 24> table,
                               InflowEstimator estimator)
    : params_(std::move(params)), table_(table), estimator_(std::move(estimator)) {
    params_.validate();
    for (const auto& row : table_) {
        if (!(row.discharge_cumecs > 0.0)) {
            throw std::invalid_argument("schedule policy: non-positive discharge in table");
        }
    }
}

env::Action SchedulePolicy::act(const env::EnvState& state, bool) {
    const double estimate = estimator_ ? estimator_(state) : 0.0;
    return baseline_act(state, {estimate}, params_, table_);
}

SchedulePolicy::InflowEstimator
estimator_from_source(std::shared_ptr<const env::InflowSource> source) {
    if (!source) throw std::invalid_argument("estimator_from_source: null source");
    return [source = std::move(source)](const env::EnvState& state) {
        const double rf_guess = state.rainfall_window.empty() ? 0.0 : state.rainfall_window[0];
        return source->inflow_bcm(state.date, rf_guess, state.rainfall_window);
    };
}

namespace {

class ConstantPolicy final : public PolicyInterface {
  public:
    explicit ConstantPolicy(hydro::Discharge c) : c_(c) {}
    env::Action act(const env::EnvState&, bool) override { return {c_}; }

  private:
    hydro::Discharge c_;
};

class RandomPolicy final : public PolicyInterface {
  public:
    RandomPolicy(std::uint64_t seed, hydro::Discharge lo, hydro::Discharge hi)
        : rng_(derive_stream(seed, "random-policy")), lo_(lo.cumecs), hi_(hi.cumecs) {}
    env::Action act(const env::EnvState&, bool) override {
        return {hydro::Discharge{rng_.uniform(lo_, hi_)}};
    }

  private:
    RngStream rng_;
    double lo_, hi_;
};

} // namespace

std::unique_ptr<PolicyInterface> constant_policy(hydro::Discharge c, hydro::Discharge a_max) {
    if (c.cumecs < 0.0 || c.cumecs > a_max.cumecs) {
        throw std::invalid_argument("constant policy: discharge " + std::to_string(c.cumecs) +
                                    " outside [0, " + std::to_string(a_max.cumecs) + "]");
    }
    return std::make_unique<ConstantPolicy>(c);
}

std::unique_ptr<PolicyInterface> random_policy(std::uint64_t seed, hydro::Discharge lo,
                                               hydro::Discharge hi, hydro::Discharge a_max) {
    if (lo.cumecs < 0.0 || hi.cumecs > a_max.cumecs || lo.cumecs > hi.cumecs) {
        throw std::invalid_argument("random policy: bounds outside [0, a_max]");
    }
    return std::make_unique<RandomPolicy>(seed, lo, hi);
}

} // namespace damrl::policy
