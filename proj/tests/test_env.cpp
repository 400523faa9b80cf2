#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

#include "damrl/data/synthetic.hpp"
#include "damrl/env/environment.hpp"
#include "damrl/env/episode.hpp"
#include "damrl/hydro/reward.hpp"
#include "damrl/policy/policies.hpp"
#include "support/test_helpers.hpp"

using namespace damrl;
using namespace damrl::env;

namespace {

class ConstantInflow final : public InflowSource {
  public:
    explicit ConstantInflow(double bcm) : bcm_(bcm) {}
    double inflow_bcm(Date, double, const std::vector<double>&) const override { return bcm_; }

  private:
    double bcm_;
};

class NanInflow final : public InflowSource {
  public:
    double inflow_bcm(Date, double, const std::vector<double>&) const override {
        return std::nan("");
    }
};

class NanRainfall final : public RainfallSource {
  public:
    double rainfall_mm(Date, RngStream&) const override { return std::nan(""); }
};

EpisodeConfig basic_config(double initial_level_m, double inflow_bcm, Date start = {2018, 6, 1}) {
    EpisodeConfig cfg;
    cfg.initial_level = {initial_level_m};
    cfg.start_date = start;
    cfg.inflow = std::make_shared<ConstantInflow>(inflow_bcm);
    cfg.rainfall = std::make_shared<ZeroRainfall>();
    return cfg;
}

std::shared_ptr<const std::vector<data::DailyRecord>> benchmark_records() {
    static const auto records = std::make_shared<const std::vector<data::DailyRecord>>(
        data::synthesize(data::SyntheticConfig::monsoon_preset(7, 2014, 3)));
    return records;
}

double storage_of(const hydro::SimParams& params, hydro::WaterLevel h) {
    return params.curve().storage_from_level(h).bcm;
}

} // namespace

TEST_CASE("dry season covers november through june, wrapping the new year") {
    const hydro::SimParams params;
    CHECK(is_dry_season(Date{2018, 11, 1}, params));
    CHECK(is_dry_season(Date{2019, 1, 15}, params));
    CHECK(is_dry_season(Date{2019, 6, 30}, params));
    CHECK_FALSE(is_dry_season(Date{2019, 7, 1}, params));
    CHECK_FALSE(is_dry_season(Date{2018, 10, 31}, params));
    CHECK_FALSE(is_dry_season(Date{2018, 8, 15}, params));
    CHECK(params.dry_season_day_count() == 242);
}

TEST_CASE("day_of_water_year counts from june first") {
    const hydro::SimParams params;
    CHECK(day_of_water_year(Date{2018, 6, 1}, params) == 0);
    CHECK(day_of_water_year(Date{2018, 6, 2}, params) == 1);
    CHECK(day_of_water_year(Date{2018, 12, 31}, params) == 213);
    CHECK(day_of_water_year(Date{2019, 5, 31}, params) == 364);
    // Water year 2019 contains 2020-02-29.
    CHECK(day_of_water_year(Date{2020, 5, 31}, params) == 365);
}

TEST_CASE("episode config validation") {
    EpisodeConfig cfg = basic_config(335.0, 0.0);
    CHECK_NOTHROW(cfg.validate());

    EpisodeConfig no_inflow = cfg;
    no_inflow.inflow.reset();
    CHECK_THROWS_AS(no_inflow.validate(), std::invalid_argument);

    EpisodeConfig no_rain = cfg;
    no_rain.rainfall.reset();
    CHECK_THROWS_AS(no_rain.validate(), std::invalid_argument);

    EpisodeConfig too_high = cfg;
    too_high.initial_level = {360.0};
    CHECK_THROWS_AS(too_high.validate(), std::invalid_argument);

    EpisodeConfig too_low = cfg;
    too_low.initial_level = {327.0};
    CHECK_THROWS_AS(too_low.validate(), std::invalid_argument);

    // Inside the curve domain but under the dead-storage line.
    EpisodeConfig below_dead = cfg;
    below_dead.initial_level = {328.0};
    CHECK_THROWS_AS(below_dead.validate(), std::invalid_argument);
}

TEST_CASE("no flux means a perfectly steady level") {
    Environment env(basic_config(335.0, 0.0));
    env.reset();
    for (int t = 0; t < 50; ++t) {
        const auto out = env.step({hydro::Discharge{0.0}});
        CHECK(out.next_state.level.meters == 335.0);
        CHECK(out.inflow.bcm == 0.0);
        CHECK(out.released.bcm == 0.0);
        CHECK(out.spilled.bcm == 0.0);
    }
}

TEST_CASE("release stops at the dead storage line") {
    const hydro::SimParams params;
    Environment env(basic_config(328.2, 0.0));
    const double start_storage = storage_of(params, {328.2});
    REQUIRE(start_storage > params.dam_base_water.bcm);

    env.reset();
    auto out = env.step({params.a_max});
    // The full a_max day-volume exceeds what is above dead storage.
    CHECK(hydro::discharge_to_volume(params.a_max).bcm > start_storage);
    CHECK(out.released.bcm == doctest::Approx(start_storage - params.dam_base_water.bcm)
                                  .epsilon(1e-12));
    CHECK(storage_of(params, out.next_state.level) ==
          doctest::Approx(params.dam_base_water.bcm).epsilon(1e-12));

    // Nothing further can be released from the dead pool.
    out = env.step({params.a_max});
    CHECK(out.released.bcm == 0.0);
}

TEST_CASE("actions are clipped to [0, a_max]") {
    const hydro::SimParams params;
    Environment env(basic_config(335.0, 0.01));
    env.reset();
    auto out = env.step({hydro::Discharge{-250.0}});
    CHECK(out.applied.cumecs == 0.0);
    CHECK(out.released.bcm == 0.0);
    out = env.step({hydro::Discharge{99999.0}});
    CHECK(out.applied.cumecs == params.a_max.cumecs);

    CHECK_THROWS_AS((void)env.step({hydro::Discharge{std::nan("")}}), std::invalid_argument);
}

TEST_CASE("overflow spills at the cap and charges the dam break penalty") {
    const hydro::SimParams params;
    const double cap_storage = storage_of(params, params.dam_cap);
    Environment env(basic_config(342.9, 0.05));
    env.reset();

    const double start_storage = storage_of(params, {342.9});
    const auto out = env.step({hydro::Discharge{0.0}});
    CHECK(out.overflowed);
    CHECK(out.spilled.bcm == doctest::Approx(start_storage + 0.05 - cap_storage).epsilon(1e-12));
    CHECK(out.next_state.level.meters == doctest::Approx(params.dam_cap.meters).epsilon(1e-12));
    CHECK(out.reward.dam_break == params.dam_break_damage);
    CHECK_FALSE(out.done); // the episode continues after an overflow day

    // Without the inflow surplus the next day does not overflow again.
    Environment calm(basic_config(342.9, 0.0));
    calm.reset();
    const auto quiet = calm.step({hydro::Discharge{0.0}});
    CHECK_FALSE(quiet.overflowed);
    CHECK(quiet.reward.dam_break == 0.0);
}

TEST_CASE("state windows shift by one day per step") {
    // Seven known pre-episode rainfall days seed the window at reset.
    std::vector<data::DailyRecord> records;
    const Date start{2018, 6, 1};
    for (int i = -7; i < 30; ++i) {
        data::DailyRecord r;
        r.date = start.plus_days(i);
        r.rainfall_mm = 100.0 + i; // distinct, identifiable values
        r.water_level_m = 335.0;
        r.inflow_bcm = 0.001;
        records.push_back(r);
    }
    auto shared = std::make_shared<const std::vector<data::DailyRecord>>(std::move(records));

    EpisodeConfig cfg = basic_config(335.0, 0.0, start);
    cfg.rainfall = std::make_shared<ReplayRainfall>(shared);
    Environment env(cfg);

    const auto& s0 = env.reset();
    REQUIRE(s0.rainfall_window.size() == 7);
    for (int j = 1; j <= 7; ++j) {
        CHECK(s0.rainfall_window[static_cast<std::size_t>(j - 1)] == 100.0 - j);
    }
    REQUIRE(s0.level_window14.size() == 14);
    for (const double h : s0.level_window14) CHECK(h == 335.0);

    const auto prev_rf = s0.rainfall_window;
    const auto prev_lv = s0.level_window14;
    const auto out = env.step({hydro::Discharge{10.0}});

    CHECK(out.rainfall_mm == 100.0); // the start date's recorded rainfall
    REQUIRE(out.next_state.rainfall_window.size() == 7);
    CHECK(out.next_state.rainfall_window[0] == out.rainfall_mm);
    for (std::size_t i = 1; i < 7; ++i) {
        CHECK(out.next_state.rainfall_window[i] == prev_rf[i - 1]);
    }
    REQUIRE(out.next_state.level_window14.size() == 14);
    for (std::size_t i = 0; i + 1 < 14; ++i) {
        CHECK(out.next_state.level_window14[i] == prev_lv[i + 1]);
    }
    CHECK(out.next_state.level_window14.back() == out.next_state.level.meters);
    CHECK(out.next_state.day_index == 1);
    CHECK(out.next_state.date == start.plus_days(1));
}

TEST_CASE("reset without rainfall history zero-fills the window") {
    Environment env(basic_config(335.0, 0.0));
    const auto& s = env.reset();
    for (const double rf : s.rainfall_window) CHECK(rf == 0.0);
}

TEST_CASE("dry season flag in the reward follows the decision day") {
    // Stepping from Oct 31: the action is decided on a monsoon-season day,
    // so no irrigation accrues even though the day ends on Nov 1.
    Environment env(basic_config(335.0, 0.0, Date{2018, 10, 31}));
    env.reset();
    auto out = env.step({hydro::Discharge{0.0}});
    CHECK_FALSE(out.reward.dry_season);
    // Potentials are reported for diagnostics but none of it enters the total.
    const hydro::SimParams params;
    CHECK(out.reward.total == doctest::Approx(params.power_potential_slope * out.reward.hydro -
                                              params.flooded_area_slope * out.reward.flood)
                                  .epsilon(1e-12));
    // The next decision day is Nov 1; irrigation starts accruing.
    const double monsoon_total = out.reward.total;
    out = env.step({hydro::Discharge{0.0}});
    CHECK(out.reward.dry_season);
    CHECK(out.reward.total > monsoon_total);
}

TEST_CASE("flood term uses the 14 day maximum after the shift") {
    const hydro::SimParams params;
    // Start high and drain hard; the peak stays in the window for 13 steps.
    Environment env(basic_config(341.0, 0.0));
    env.reset();
    for (int t = 0; t < 13; ++t) {
        const auto out = env.step({params.a_max});
        CHECK(out.next_state.level.meters < 341.0);
        CHECK(out.reward.flood == hydro::flood_damage({341.0}));
    }
    // Once the initial level leaves the window the damage drops.
    const auto out = env.step({params.a_max});
    const double h_max = *std::max_element(out.next_state.level_window14.begin(),
                                           out.next_state.level_window14.end());
    CHECK(h_max < 341.0);
    CHECK(out.reward.flood == hydro::flood_damage({h_max}));
    CHECK(out.reward.flood < hydro::flood_damage({341.0}));
}

TEST_CASE("reward total composes the published formula") {
    const hydro::SimParams params;
    EpisodeConfig cfg = basic_config(338.0, 0.0, Date{2018, 9, 1});
    cfg.inflow = std::make_shared<ConstantInflow>(0.004);
    cfg.seed = 3;
    Environment env(cfg);
    env.reset();
    RngStream actions(42);
    for (int t = 0; t < 200; ++t) {
        const auto out = env.step({hydro::Discharge{actions.uniform(0.0, 300.0)}});
        const auto& r = out.reward;
        const double irrigation =
            r.dry_season
                ? (params.rice_slope * r.rice + params.wheat_slope * r.wheat) /
                      params.dry_season_day_count()
                : 0.0;
        const double expected = params.power_potential_slope * r.hydro + irrigation -
                                params.flooded_area_slope * r.flood - r.dam_break;
        CHECK(r.total == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("water balance closes every day of a replayed episode") {
    const auto records = benchmark_records();
    const hydro::SimParams params;

    EpisodeConfig cfg;
    cfg.initial_level = records->front().water_level_m
                            ? hydro::WaterLevel{*records->front().water_level_m}
                            : hydro::WaterLevel{335.0};
    cfg.start_date = Date{2015, 6, 1};
    cfg.rainfall = std::make_shared<ReplayRainfall>(records);
    cfg.inflow = std::make_shared<ReplayInflow>(records);
    cfg.seed = 11;
    Environment env(cfg);

    env.reset();
    double storage = storage_of(params, cfg.initial_level);
    RngStream actions(5);
    for (int t = 0; t < params.max_step; ++t) {
        const auto out = env.step({hydro::Discharge{actions.uniform(0.0, 800.0)}});
        const double next_storage = storage_of(params, out.next_state.level);
        const double closure =
            next_storage - storage - (out.inflow.bcm - out.released.bcm - out.spilled.bcm);
        CHECK(std::abs(closure) <= 1e-9);
        storage = next_storage;
        CHECK(out.next_state.level.meters >= params.curve().domain_min().meters);
        CHECK(out.next_state.level.meters <= params.dam_cap.meters + 1e-12);
    }
}

TEST_CASE("episode ends after max_step days and refuses further steps") {
    EpisodeConfig cfg = basic_config(335.0, 0.0);
    Environment env(cfg);
    CHECK_THROWS_AS((void)env.state(), std::logic_error);
    CHECK_THROWS_AS((void)env.step({hydro::Discharge{0.0}}), std::logic_error);

    env.reset();
    StepOutcome last;
    for (int t = 0; t < cfg.params.max_step; ++t) {
        last = env.step({hydro::Discharge{0.0}});
        CHECK(last.done == (t + 1 == cfg.params.max_step));
    }
    CHECK(last.next_state.day_index == cfg.params.max_step);
    CHECK_THROWS_AS((void)env.step({hydro::Discharge{0.0}}), std::logic_error);

    // reset() rearms the same environment.
    env.reset();
    CHECK_NOTHROW((void)env.step({hydro::Discharge{0.0}}));
}

TEST_CASE("non-finite source values are hard errors") {
    EpisodeConfig bad_inflow = basic_config(335.0, 0.0);
    bad_inflow.inflow = std::make_shared<NanInflow>();
    Environment env1(bad_inflow);
    env1.reset();
    CHECK_THROWS_AS((void)env1.step({hydro::Discharge{0.0}}), std::runtime_error);

    EpisodeConfig bad_rain = basic_config(335.0, 0.0);
    bad_rain.rainfall = std::make_shared<NanRainfall>();
    Environment env2(bad_rain);
    env2.reset();
    CHECK_THROWS_AS((void)env2.step({hydro::Discharge{0.0}}), std::runtime_error);
}

TEST_CASE("replay sources demand matching records") {
    const auto records = benchmark_records();
    const Date past_end = records->back().date.plus_days(1);

    RngStream rng(1);
    ReplayRainfall rain(records);
    CHECK_THROWS_WITH_AS((void)rain.rainfall_mm(past_end, rng),
                         doctest::Contains(past_end.to_string().c_str()), std::runtime_error);

    ReplayInflow inflow(records);
    CHECK_THROWS_AS((void)inflow.inflow_bcm(past_end, 0.0, {}), std::runtime_error);

    // First record has no derivable inflow (no prior level), so replaying it fails.
    std::vector<data::DailyRecord> no_inflow = {records->front()};
    no_inflow[0].inflow_bcm.reset();
    auto shared = std::make_shared<const std::vector<data::DailyRecord>>(std::move(no_inflow));
    ReplayInflow gap(shared);
    CHECK_THROWS_AS((void)gap.inflow_bcm(shared->front().date, 0.0, {}), std::runtime_error);

    CHECK_THROWS_AS(ReplayRainfall(nullptr), std::invalid_argument);
}

TEST_CASE("bootstrap rainfall draws from the matching calendar day") {
    // Three years of records give each calendar day a three-value pool.
    const auto records = benchmark_records();
    BootstrapRainfall rain(records);

    std::vector<double> pool;
    for (const auto& r : *records) {
        if (r.date.month() == 7 && r.date.day() == 15) pool.push_back(r.rainfall_mm);
    }
    REQUIRE(pool.size() == 3);

    RngStream rng(123);
    for (int i = 0; i < 100; ++i) {
        const double v = rain.rainfall_mm(Date{2030, 7, 15}, rng);
        CHECK(std::count(pool.begin(), pool.end(), v) > 0);
    }

    // The record span holds no Feb 29, so that calendar day has no pool.
    bool has_leap_day = false;
    for (const auto& r : *records) {
        has_leap_day |= (r.date.month() == 2 && r.date.day() == 29);
    }
    if (!has_leap_day) {
        CHECK_THROWS_AS((void)rain.rainfall_mm(Date{2032, 2, 29}, rng), std::runtime_error);
    }
}

TEST_CASE("identical configs replay identical episodes") {
    const auto records = benchmark_records();
    EpisodeConfig cfg;
    cfg.initial_level = {338.0};
    cfg.start_date = Date{2015, 6, 1};
    cfg.rainfall = std::make_shared<BootstrapRainfall>(records);
    cfg.inflow = std::make_shared<ConstantInflow>(0.002);
    cfg.seed = 99;

    auto roll = [&](Environment& env) {
        env.reset();
        std::ostringstream sig;
        for (int t = 0; t < 40; ++t) {
            const auto out = env.step({hydro::Discharge{50.0}});
            sig << out.rainfall_mm << ':' << out.next_state.level.meters << ';';
        }
        return sig.str();
    };
    Environment a(cfg), b(cfg);
    const auto sa = roll(a);
    CHECK(sa == roll(b));

    EpisodeConfig other = cfg;
    other.seed = 100;
    Environment c(other);
    CHECK(sa != roll(c)); // a different seed draws different bootstrap days
}

TEST_CASE("run_episode accumulates returns and writes a checkable trace") {
    const auto records = benchmark_records();
    EpisodeConfig cfg;
    cfg.initial_level = {*(*records)[400].water_level_m};
    cfg.start_date = (*records)[400].date;
    cfg.rainfall = std::make_shared<ReplayRainfall>(records);
    cfg.inflow = std::make_shared<ReplayInflow>(records);
    cfg.seed = 4;

    auto policy = policy::constant_policy({80.0}, cfg.params.a_max);
    const auto trace = run_episode(*policy, cfg, false);
    REQUIRE(trace.steps.size() == static_cast<std::size_t>(cfg.params.max_step));

    double undiscounted = 0.0, discounted = 0.0, weight = 1.0;
    for (const auto& s : trace.steps) {
        undiscounted += s.reward.total;
        discounted += weight * s.reward.total;
        weight *= cfg.params.discount;
    }
    CHECK(trace.undiscounted_return == doctest::Approx(undiscounted).epsilon(1e-12));
    CHECK(trace.discounted_return == doctest::Approx(discounted).epsilon(1e-12));

    // Same config replays to the byte.
    const auto trace2 = run_episode(*policy, cfg, false);
    const auto curve = cfg.params.curve();
    const std::string csv = trace_csv(trace, curve);
    CHECK(csv == trace_csv(trace2, curve));

    // Header and per-row water balance of the storage column.
    std::istringstream lines(csv);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line ==
          "date,level_m,storage_bcm,rainfall_mm,inflow_bcm,action_cumecs,released_bcm,"
          "spilled_bcm,reward_total,reward_rice,reward_wheat,reward_hydro,reward_flood,"
          "reward_dam_break,dry_season,overflowed");
    double prev_storage = curve.storage_from_level(cfg.initial_level).bcm;
    int rows = 0;
    while (std::getline(lines, line)) {
        std::vector<std::string> fields;
        std::istringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) fields.push_back(field);
        REQUIRE(fields.size() == 16);
        const double storage = std::stod(fields[2]);
        const double inflow = std::stod(fields[4]);
        const double released = std::stod(fields[6]);
        const double spilled = std::stod(fields[7]);
        CHECK(std::abs(storage - prev_storage - (inflow - released - spilled)) <= 1e-6);
        prev_storage = storage;
        ++rows;
    }
    CHECK(rows == cfg.params.max_step);
}
