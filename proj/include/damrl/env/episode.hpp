#pragma once

#include <string>
#include <vector>

#include "damrl/env/environment.hpp"
#include "damrl/policy/policy_interface.hpp"

namespace damrl::env {

struct EpisodeTrace {
    std::vector<StepOutcome> steps;
    double undiscounted_return = 0.0;
    double discounted_return = 0.0; // sum of gamma^t * reward_t, gamma = params.discount
};

/// Reset, then run exactly params.max_step steps under the policy.
EpisodeTrace run_episode(policy::PolicyInterface& policy, const EpisodeConfig& config,
                         bool explore = false);

/// CSV export of one trace. Header:
/// date,level_m,storage_bcm,rainfall_mm,inflow_bcm,action_cumecs,released_bcm,
/// spilled_bcm,reward_total,reward_rice,reward_wheat,reward_hydro,reward_flood,
/// reward_dam_break,dry_season,overflowed
/// The storage column makes the per-row water balance checkable:
/// storage[t] - storage[t-1] = inflow - released - spilled.
std::string trace_csv(const EpisodeTrace& trace, const hydro::StageStorageCurve& curve);
void write_trace_csv(const EpisodeTrace& trace, const hydro::StageStorageCurve& curve,
                     const std::string& path);

} // namespace damrl::env
