#pragma once

#include <string>
#include <vector>

#include "damrl/env/environment.hpp"
#include "damrl/hydro/sim_params.hpp"

namespace damrl::rl {

/// Maps EnvState to the learner's input vector and actions between the
/// normalized [-1,1] range and cumecs. Layout: [level scaled to [-1,1] over
/// the curve domain, K rainfall entries / rainfall_scale, sin and cos of the
/// water-year phase] — dimension 1 + K + 2.
struct FeatureSpec {
    double level_min_m = 0.0;
    double level_max_m = 1.0;
    double rainfall_scale_mm = 100.0;
    int k = 7;
    double a_max_cumecs = 3000.0;
    MonthDay water_year_start{6, 1};

    static FeatureSpec for_params(const hydro::SimParams& params);

    int feature_dim() const { return 1 + k + 2; }
    std::vector<double> featurize(const env::EnvState& state) const;

    /// [-1,1] -> [0, a_max] and back.
    double denormalize_action(double a_norm) const;
    double normalize_action(double cumecs) const;
};

std::string feature_spec_to_json_text(const FeatureSpec& spec);
FeatureSpec feature_spec_from_json_text(const std::string& text);

} // namespace damrl::rl
