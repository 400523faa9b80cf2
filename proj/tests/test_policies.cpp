#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>

#include "damrl/env/environment.hpp"
#include "damrl/env/episode.hpp"
#include "damrl/policy/policies.hpp"
#include "damrl/policy/schedule.hpp"
#include "support/test_helpers.hpp"

using namespace damrl;
using namespace damrl::policy;

namespace {

env::EnvState state_on(Date date, double level_m = 335.0) {
    env::EnvState s;
    s.level = {level_m};
    s.date = date;
    s.rainfall_window.assign(7, 0.0);
    s.level_window14.assign(14, level_m);
    return s;
}

} // namespace

TEST_CASE("baseline schedule carries the published ten-daily discharges") {
    const auto& table = baseline_schedule();
    const double expected[24] = {
        73.1, 68.6, 64.1,  // Nov
        59.6, 55.1, 48.5,  // Dec
        41.8, 35.2, 33.6,  // Jan
        31.9, 30.3, 29.2,  // Feb
        28.1, 27.0, 23.8,  // Mar
        20.5, 17.3, 16.1,  // Apr
        14.9, 13.7, 12.5,  // May
        11.3, 57.6, 104.0, // Jun
    };
    for (int i = 0; i < 24; ++i) CHECK(table[static_cast<std::size_t>(i)].discharge_cumecs == expected[i]);

    // Rows start Nov 01 and tile the dry season in ten-day periods.
    CHECK(table[0].start == MonthDay{11, 1});
    CHECK(table[0].end == MonthDay{11, 10});
    CHECK(table[2].start == MonthDay{11, 21});
    CHECK(table[2].end == MonthDay{11, 30});
    CHECK(table[11].end == MonthDay{2, 28});
    CHECK(table[23].start == MonthDay{6, 21});
    CHECK(table[23].end == MonthDay{6, 30});
}

TEST_CASE("lookup_period maps dates to rows") {
    CHECK(lookup_period(Date{2018, 11, 1}) == 0);
    CHECK(lookup_period(Date{2018, 11, 10}) == 0);
    CHECK(lookup_period(Date{2018, 11, 11}) == 1);
    CHECK(lookup_period(Date{2018, 11, 30}) == 2);
    CHECK(lookup_period(Date{2019, 1, 21}) == 8);
    CHECK(lookup_period(Date{2019, 2, 28}) == 11);
    CHECK(lookup_period(Date{2020, 2, 29}) == 11); // leap day joins Feb 21-28
    CHECK(lookup_period(Date{2019, 3, 31}) == 14); // third periods absorb to month end
    CHECK(lookup_period(Date{2019, 5, 31}) == 20);
    CHECK(lookup_period(Date{2019, 6, 30}) == 23);
    CHECK_THROWS_AS((void)lookup_period(Date{2019, 7, 1}), std::out_of_range);
    CHECK_THROWS_AS((void)lookup_period(Date{2019, 10, 31}), std::out_of_range);
}

TEST_CASE("schedule_discharge covers exactly the table span") {
    const auto& table = baseline_schedule();
    CHECK(schedule_discharge(table, Date{2018, 11, 5}) == 73.1);
    CHECK(schedule_discharge(table, Date{2019, 6, 25}) == 104.0);
    CHECK(schedule_discharge(table, Date{2019, 3, 31}) == 23.8);
    CHECK_FALSE(schedule_discharge(table, Date{2018, 8, 10}).has_value());
    CHECK_FALSE(schedule_discharge(table, Date{2018, 10, 31}).has_value());
}

TEST_CASE("baseline_act follows the table in season and matches inflow off season") {
    const hydro::SimParams params;
    CHECK(baseline_act(state_on({2018, 11, 5}), {0.5}, params).discharge.cumecs == 73.1);
    CHECK(baseline_act(state_on({2019, 6, 25}), {0.0}, params).discharge.cumecs == 104.0);

    // Off-schedule: pass the estimated inflow volume through.
    const hydro::StorageVolume est{0.0063158};
    const auto a = baseline_act(state_on({2018, 8, 10}), est, params);
    CHECK(a.discharge.cumecs == doctest::Approx(73.099537).epsilon(1e-6));
    CHECK(a.discharge.cumecs ==
          doctest::Approx(hydro::volume_to_discharge(est).cumecs).epsilon(1e-12));

    // Estimates beyond a_max clip.
    const auto clipped = baseline_act(state_on({2018, 8, 10}), {10.0}, params);
    CHECK(clipped.discharge.cumecs == params.a_max.cumecs);
    const auto floored = baseline_act(state_on({2018, 8, 10}), {-1.0}, params);
    CHECK(floored.discharge.cumecs == 0.0);
}

TEST_CASE("schedule policy holds the level exactly when fed the true inflow") {
    // Off-schedule months with a perfect estimator: release == inflow, so the
    // level is a fixed point of the daily update.
    const double true_inflow = 0.004;
    env::EpisodeConfig cfg;
    cfg.initial_level = {336.0};
    cfg.start_date = Date{2018, 7, 1};

    class Fixed final : public env::InflowSource {
      public:
        explicit Fixed(double v) : v_(v) {}
        double inflow_bcm(Date, double, const std::vector<double>&) const override { return v_; }

      private:
        double v_;
    };
    cfg.inflow = std::make_shared<Fixed>(true_inflow);
    cfg.rainfall = std::make_shared<env::ZeroRainfall>();

    SchedulePolicy policy(cfg.params, baseline_schedule(),
                          [&](const env::EnvState&) { return true_inflow; });
    env::Environment env(cfg);
    env.reset();
    for (int t = 0; t < 100; ++t) { // Jul 1 - Oct 8, all off-schedule
        const auto out = env.step(policy.act(env.state(), false));
        CHECK(std::abs(out.next_state.level.meters - 336.0) <= 1e-9);
    }
}

TEST_CASE("schedule policy without an estimator assumes zero inflow") {
    const hydro::SimParams params;
    SchedulePolicy policy(params);
    CHECK(policy.act(state_on({2018, 8, 10}), false).discharge.cumecs == 0.0);
    CHECK(policy.act(state_on({2018, 11, 5}), false).discharge.cumecs == 73.1);
}

TEST_CASE("estimator_from_source substitutes the latest observed rainfall") {
    class Probe final : public env::InflowSource {
      public:
        double inflow_bcm(Date, double rf_today,
                          const std::vector<double>& window) const override {
            // Persistence: the estimator must pass window[0] as today's value.
            CHECK(rf_today == window[0]);
            return 0.001 * rf_today;
        }
    };
    auto est = estimator_from_source(std::make_shared<Probe>());
    auto s = state_on({2018, 8, 10});
    s.rainfall_window = {12.0, 5.0, 0.0, 0.0, 1.0, 2.0, 3.0};
    CHECK(est(s) == doctest::Approx(0.012).epsilon(1e-12));
}

TEST_CASE("constant and random policies respect their bounds") {
    const hydro::SimParams params;
    auto c = constant_policy({120.0}, params.a_max);
    CHECK(c->act(state_on({2018, 8, 1}), false).discharge.cumecs == 120.0);
    CHECK(c->act(state_on({2019, 2, 1}), true).discharge.cumecs == 120.0);
    CHECK_THROWS_AS((void)constant_policy({-1.0}, params.a_max), std::invalid_argument);
    CHECK_THROWS_AS((void)constant_policy({3500.0}, params.a_max), std::invalid_argument);

    auto r = random_policy(9, {50.0}, {150.0}, params.a_max);
    for (int i = 0; i < 200; ++i) {
        const double a = r->act(state_on({2018, 8, 1}), true).discharge.cumecs;
        CHECK(a >= 50.0);
        CHECK(a <= 150.0);
    }
    // Reproducible by seed.
    auto r1 = random_policy(4, {0.0}, {3000.0}, params.a_max);
    auto r2 = random_policy(4, {0.0}, {3000.0}, params.a_max);
    for (int i = 0; i < 50; ++i) {
        CHECK(r1->act(state_on({2018, 8, 1}), true).discharge.cumecs ==
              r2->act(state_on({2018, 8, 1}), true).discharge.cumecs);
    }
    CHECK_THROWS_AS((void)random_policy(1, {100.0}, {50.0}, params.a_max), std::invalid_argument);
    CHECK_THROWS_AS((void)random_policy(1, {-5.0}, {50.0}, params.a_max), std::invalid_argument);
    CHECK_THROWS_AS((void)random_policy(1, {0.0}, {5000.0}, params.a_max), std::invalid_argument);
}

TEST_CASE("schedule csv round trip") {
    testutil::TempDir tmp("schedule-csv");
    const auto& table = baseline_schedule();
    const std::string path = tmp.path("schedule.csv");
    write_schedule_csv(table, path);
    const auto back = load_schedule_csv(path);
    for (std::size_t i = 0; i < table.size(); ++i) {
        CHECK(back[i].start == table[i].start);
        CHECK(back[i].end == table[i].end);
        CHECK(back[i].discharge_cumecs == table[i].discharge_cumecs);
    }
    CHECK_THROWS_AS((void)load_schedule_csv(tmp.path("missing.csv")), std::runtime_error);
}
