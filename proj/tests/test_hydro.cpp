#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "damrl/hydro/reward.hpp"
#include "damrl/hydro/sim_params.hpp"
#include "damrl/hydro/stage_storage.hpp"

using namespace damrl;
using namespace damrl::hydro;

namespace {
const StageStorageCurve kCurve = StageStorageCurve::bansagar();
}

TEST_CASE("storage_from_level golden values") {
    CHECK(std::abs(kCurve.storage_from_level({342.934}).bcm - 5.4938) <= 1e-3);
    CHECK(std::abs(kCurve.storage_from_level({327.895}).bcm) < 1e-3);
    const WaterLevel h = kCurve.level_from_storage({1.0});
    CHECK(std::abs(kCurve.storage_from_level(h).bcm - 1.0) <= 1e-12);
}

TEST_CASE("storage_from_level rejects out-of-domain levels") {
    CHECK_THROWS_AS(kCurve.storage_from_level({320.0}), std::domain_error);
    CHECK_THROWS_AS(kCurve.storage_from_level({400.0}), std::domain_error);
    CHECK_THROWS_AS(kCurve.storage_from_level({std::nan("")}), std::invalid_argument);
}

TEST_CASE("level_from_storage golden values") {
    CHECK(std::abs(kCurve.level_from_storage({0.1}).meters - 328.168) <= 1e-2);
    const StorageVolume s = kCurve.storage_from_level({340.0});
    CHECK(std::abs(kCurve.level_from_storage(s).meters - 340.0) <= 1e-9);
    CHECK(std::abs(kCurve.level_from_storage({5.4938}).meters - 342.934) <= 1e-2);
}

TEST_CASE("level_from_storage rejects negative storage") {
    CHECK_THROWS_AS(kCurve.level_from_storage({-0.001}), std::domain_error);
}

TEST_CASE("stage-storage roundtrip over the full domain") {
    const double lo = kCurve.domain_min().meters;
    const double hi = kCurve.domain_max().meters;
    for (int i = 0; i <= 1000; ++i) {
        const double h = lo + (hi - lo) * i / 1000.0;
        const double back = kCurve.level_from_storage(kCurve.storage_from_level({h})).meters;
        CHECK(std::abs(back - h) <= 1e-9 * std::max(1.0, std::abs(h)));
    }
}

TEST_CASE("flood damage golden values and monotonicity") {
    CHECK(std::abs(flood_damage({320.0}) - 0.680) <= 0.01);
    CHECK(std::abs(flood_damage({342.934}) - 8.8e4) <= 0.05 * 8.8e4);
    CHECK(flood_damage({330.0}) > flood_damage({320.0}));
    CHECK_THROWS_AS(flood_damage({0.0}), std::domain_error);
    CHECK_THROWS_AS(flood_damage({-1.0}), std::domain_error);
}

TEST_CASE("flood damage is log-linear with slope 170") {
    const double h1 = 315.0, h2 = 341.5;
    const double lhs = std::log(flood_damage({h2})) - std::log(flood_damage({h1}));
    const double rhs = 170.0 * (std::log(h2) - std::log(h1));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
}

TEST_CASE("direct evaluation of the flood power overflows") {
    // The reason flood_damage must work in log space.
    CHECK(std::isinf(std::pow(320.0, 170.0)));
}

TEST_CASE("crop and power potentials") {
    CHECK(std::abs(rice_potential({342.934}) - 1.9748) <= 1e-3);
    CHECK(std::abs(rice_potential({43.121 / 0.1315})) < 1e-9);
    CHECK(rice_potential({300.0}) == 0.0);

    CHECK(std::abs(wheat_potential({342.934}) - 3.9621) <= 1e-3);
    CHECK(std::abs(wheat_potential({86.641 / 0.2642})) < 1e-9);
    CHECK(wheat_potential({300.0}) == 0.0);

    CHECK(std::abs(hydropower_potential({342.934}) - 438.25) <= 0.1);
    CHECK(std::abs(hydropower_potential({1342.5 / 5.1927})) < 1e-9);
    CHECK(hydropower_potential({250.0}) == 0.0);
}

TEST_CASE("potentials are non-decreasing and zero below their crossings") {
    double prev_rice = -1, prev_wheat = -1, prev_hydro = -1;
    for (double h = 200.0; h <= 360.0; h += 0.5) {
        const double r = rice_potential({h});
        const double w = wheat_potential({h});
        const double p = hydropower_potential({h});
        CHECK(r >= prev_rice);
        CHECK(w >= prev_wheat);
        CHECK(p >= prev_hydro);
        if (h < 43.121 / 0.1315) CHECK(r == 0.0);
        if (h < 86.641 / 0.2642) CHECK(w == 0.0);
        if (h < 1342.5 / 5.1927) CHECK(p == 0.0);
        prev_rice = r;
        prev_wheat = w;
        prev_hydro = p;
    }
}

TEST_CASE("aggregate_reward composes the component models") {
    SimParams params;
    const auto r = aggregate_reward({300.0}, {300.0}, false, false, params);
    const double expected = 0.003 * hydropower_potential({300.0}) - 0.00006 * flood_damage({300.0});
    CHECK(r.total == doctest::Approx(expected).epsilon(1e-12));
    CHECK(r.rice == 0.0);
    CHECK(r.wheat == 0.0);
    CHECK(r.rice_raw < 0.0); // unclamped diagnostics keep the affine value
    CHECK(r.dam_break == 0.0);
}

TEST_CASE("overflow charges the dam-break penalty once") {
    SimParams params;
    const auto base = aggregate_reward({335.0}, {335.0}, true, false, params);
    const auto burst = aggregate_reward({335.0}, {335.0}, true, true, params);
    CHECK(burst.total == doctest::Approx(base.total - 80.0).epsilon(1e-12));
    CHECK(burst.dam_break == 80.0);
}

TEST_CASE("zero-slope params give zero reward") {
    SimParams params;
    params.flooded_area_slope = 0.0;
    params.power_potential_slope = 0.0;
    params.wheat_slope = 0.0;
    params.rice_slope = 0.0;
    const auto r = aggregate_reward({335.0}, {340.0}, true, false, params);
    CHECK(r.total == 0.0);
}

TEST_CASE("aggregate_reward is affine in each weight") {
    SimParams params;
    const WaterLevel h{338.0}, hm{339.0};

    auto total = [&](const SimParams& p) { return aggregate_reward(h, hm, true, false, p).total; };

    const double t0 = total(params);
    SimParams p2 = params;
    p2.power_potential_slope *= 2.0;
    const double hydro_part = params.power_potential_slope * hydropower_potential(h);
    CHECK(total(p2) - t0 == doctest::Approx(hydro_part).epsilon(1e-9));

    SimParams p3 = params;
    p3.flooded_area_slope *= 2.0;
    const double flood_part = params.flooded_area_slope * flood_damage(hm);
    CHECK(t0 - total(p3) == doctest::Approx(flood_part).epsilon(1e-9));

    SimParams p4 = params;
    p4.rice_slope *= 2.0;
    const double rice_part = params.rice_slope * rice_potential(h) / params.dry_season_day_count();
    CHECK(total(p4) - t0 == doctest::Approx(rice_part).epsilon(1e-9));
}

TEST_CASE("discharge/volume unit bridge") {
    CHECK(std::abs(discharge_to_volume({73.1}).bcm - 0.0063158) <= 1e-6);
    CHECK(discharge_to_volume({0.0}).bcm == 0.0);
    CHECK(discharge_to_volume({1000.0 / 86.4}).bcm == doctest::Approx(0.001).epsilon(1e-12));
    CHECK_THROWS_AS(discharge_to_volume({-1.0}), std::invalid_argument);
    CHECK(volume_to_discharge(discharge_to_volume({73.1})).cumecs == doctest::Approx(73.1).epsilon(1e-12));
}

TEST_CASE("dry-season day count for the Nov-Jun default") {
    SimParams params;
    CHECK(params.dry_season_day_count() == 242);
}

TEST_CASE("sim params config roundtrip uses the published key names") {
    SimParams params;
    params.a_max.cumecs = 2500.0;
    params.rainfall_window = 9;
    KeyValueConfig cfg;
    params.to_config(cfg);

    for (const char* key : {"dam_cap", "dam_break_damage", "dam_base_water", "water_year_start",
                            "water_year_end", "dry_season_months", "discount", "max_step",
                            "flooded_area_slope", "power_potential_slope", "wheat_slope",
                            "rice_slope", "a_max", "flood_window", "rainfall_window"})
        CHECK(cfg.has(key));

    const SimParams back = SimParams::from_config(KeyValueConfig::parse_string(cfg.serialize()));
    CHECK(back.dam_cap.meters == params.dam_cap.meters);
    CHECK(back.a_max.cumecs == 2500.0);
    CHECK(back.rainfall_window == 9);
    CHECK(back.water_year_start == MonthDay{6, 1});
    CHECK(back.dry_season.first == 11);
    CHECK(back.dry_season.last == 6);
}

TEST_CASE("sim params validation") {
    SimParams p;
    p.discount = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = SimParams{};
    p.dam_base_water.bcm = 10.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = SimParams{};
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("config parses Table-style month values") {
    auto cfg = KeyValueConfig::parse_string(
        "water_year_start = 01 June\nwater_year_end = 31 May\ndry_season_months = Nov-Jun\n");
    const SimParams p = SimParams::from_config(cfg);
    CHECK(p.water_year_start == MonthDay{6, 1});
    CHECK(p.water_year_end == MonthDay{5, 31});
    CHECK(p.dry_season.contains(11));
    CHECK(p.dry_season.contains(6));
    CHECK(!p.dry_season.contains(8));
}
