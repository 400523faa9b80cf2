#pragma once

#include <array>
#include <functional>
#include <memory>

#include "damrl/common/rng.hpp"
#include "damrl/policy/policy_interface.hpp"
#include "damrl/policy/schedule.hpp"

namespace damrl::policy {

/// The schedule rule as a pure function: inside Nov 1 - Jun 30 the table's
/// discharge for the containing ten-daily period; outside, the discharge
/// whose daily volume equals inflow_estimate (level-stable rule). The result
/// is clipped to [0, a_max].
env::Action baseline_act(const env::EnvState& state, hydro::StorageVolume inflow_estimate,
                         const hydro::SimParams& params,
                         const std::array<SchedulePeriod, 24>& table = baseline_schedule());

/// Human baseline operator. Off-schedule months need an inflow estimate; the
/// estimator receives the pre-step state (today's rainfall is not yet
/// observed). With no estimator the policy assumes zero inflow.
class SchedulePolicy final : public PolicyInterface {
  public:
    using InflowEstimator = std::function<double(const env::EnvState&)>; // BCM/day

    explicit SchedulePolicy(hydro::SimParams params,
                            std::array<SchedulePeriod, 24> table = baseline_schedule(),
                            InflowEstimator estimator = {});

    env::Action act(const env::EnvState& state, bool explore) override;

    const std::array<SchedulePeriod, 24>& table() const { return table_; }

  private:
    hydro::SimParams params_;
    std::array<SchedulePeriod, 24> table_;
    InflowEstimator estimator_;
};

/// Estimator that asks an inflow source for a one-step estimate, substituting
/// the most recent observed rainfall for today's still-unknown value.
SchedulePolicy::InflowEstimator
estimator_from_source(std::shared_ptr<const env::InflowSource> source);

/// Always releases c. Throws std::invalid_argument when c is outside
/// [0, a_max].
std::unique_ptr<PolicyInterface> constant_policy(hydro::Discharge c, hydro::Discharge a_max);

/// Uniform draws in [lo, hi], reproducible by seed. Throws
/// std::invalid_argument when the bounds leave [0, a_max] or lo > hi.
std::unique_ptr<PolicyInterface> random_policy(std::uint64_t seed, hydro::Discharge lo,
                                               hydro::Discharge hi, hydro::Discharge a_max);

} // namespace damrl::policy
