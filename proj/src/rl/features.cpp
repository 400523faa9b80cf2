#include "damrl/rl/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace damrl::rl {

FeatureSpec FeatureSpec::for_params(const hydro::SimParams& params) {
    const auto curve = params.curve();
    FeatureSpec spec;
    spec.level_min_m = curve.domain_min().meters;
    spec.level_max_m = curve.domain_max().meters;
    spec.k = params.rainfall_window;
    spec.a_max_cumecs = params.a_max.cumecs;
    spec.water_year_start = params.water_year_start;
    return spec;
}

std::vector<double> FeatureSpec::featurize(const env::EnvState& state) const {
    if (state.rainfall_window.size() != static_cast<std::size_t>(k)) {
        throw std::invalid_argument("featurize: state rainfall window has " +
                                    std::to_string(state.rainfall_window.size()) +
                                    " entries, spec expects " + std::to_string(k));
    }
    std::vector<double> f;
    f.reserve(static_cast<std::size_t>(feature_dim()));
    const double span = level_max_m - level_min_m;
    f.push_back(std::clamp(2.0 * (state.level.meters - level_min_m) / span - 1.0, -1.0, 1.0));
    for (double rf : state.rainfall_window) f.push_back(rf / rainfall_scale_mm);
    Date wy_start(state.date.year(), water_year_start.month, water_year_start.day);
    if (state.date < wy_start) {
        wy_start = Date(state.date.year() - 1, water_year_start.month, water_year_start.day);
    }
    const double phase = 2.0 * std::numbers::pi *
                         static_cast<double>(days_between(wy_start, state.date)) / 365.25;
    f.push_back(std::sin(phase));
    f.push_back(std::cos(phase));
    return f;
}

double FeatureSpec::denormalize_action(double a_norm) const {
    const double clipped = std::clamp(a_norm, -1.0, 1.0);
    return 0.5 * (clipped + 1.0) * a_max_cumecs;
}

double FeatureSpec::normalize_action(double cumecs) const {
    return std::clamp(2.0 * cumecs / a_max_cumecs - 1.0, -1.0, 1.0);
}

std::string feature_spec_to_json_text(const FeatureSpec& spec) {
    nlohmann::json doc;
    doc["level_min_m"] = spec.level_min_m;
    doc["level_max_m"] = spec.level_max_m;
    doc["rainfall_scale_mm"] = spec.rainfall_scale_mm;
    doc["k"] = spec.k;
    doc["a_max_cumecs"] = spec.a_max_cumecs;
    doc["water_year_start_month"] = spec.water_year_start.month;
    doc["water_year_start_day"] = spec.water_year_start.day;
    return doc.dump(2) + "\n";
}

FeatureSpec feature_spec_from_json_text(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    FeatureSpec spec;
    spec.level_min_m = doc.at("level_min_m").get<double>();
    spec.level_max_m = doc.at("level_max_m").get<double>();
    spec.rainfall_scale_mm = doc.at("rainfall_scale_mm").get<double>();
    spec.k = doc.at("k").get<int>();
    spec.a_max_cumecs = doc.at("a_max_cumecs").get<double>();
    spec.water_year_start.month = doc.at("water_year_start_month").get<unsigned>();
    spec.water_year_start.day = doc.at("water_year_start_day").get<unsigned>();
    return spec;
}

} // namespace damrl::rl
