#include "damrl/env/episode.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace damrl::env {

EpisodeTrace run_episode(policy::PolicyInterface& policy, const EpisodeConfig& config,
                         bool explore) {
    Environment env(config);
    EpisodeTrace trace;
    trace.steps.reserve(static_cast<std::size_t>(config.params.max_step));
    const EnvState* state = &env.reset();
    double gamma_t = 1.0;
    for (int t = 0; t < config.params.max_step; ++t) {
        const Action action = policy.act(*state, explore);
        StepOutcome out = env.step(action);
        trace.undiscounted_return += out.reward.total;
        trace.discounted_return += gamma_t * out.reward.total;
        gamma_t *= config.params.discount;
        trace.steps.push_back(std::move(out));
        state = &env.state();
    }
    return trace;
}

std::string trace_csv(const EpisodeTrace& trace, const hydro::StageStorageCurve& curve) {
    std::string out =
        "date,level_m,storage_bcm,rainfall_mm,inflow_bcm,action_cumecs,released_bcm,spilled_bcm,"
        "reward_total,reward_rice,reward_wheat,reward_hydro,reward_flood,reward_dam_break,"
        "dry_season,overflowed\n";
    char buf[512];
    for (const auto& s : trace.steps) {
        // The row's date is the simulated day; level is that day's outcome.
        const Date day = s.next_state.date.plus_days(-1);
        const double storage = curve.storage_from_level(s.next_state.level).bcm;
        std::snprintf(buf, sizeof buf,
                      ",%.6f,%.9g,%.6f,%.9g,%.6f,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%d,%d\n",
                      s.next_state.level.meters, storage, s.rainfall_mm, s.inflow.bcm,
                      s.applied.cumecs, s.released.bcm, s.spilled.bcm, s.reward.total,
                      s.reward.rice, s.reward.wheat, s.reward.hydro, s.reward.flood,
                      s.reward.dam_break, s.reward.dry_season ? 1 : 0, s.overflowed ? 1 : 0);
        out += day.to_string();
        out += buf;
    }
    return out;
}

void write_trace_csv(const EpisodeTrace& trace, const hydro::StageStorageCurve& curve,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace file: " + path);
    out << trace_csv(trace, curve);
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace damrl::env
