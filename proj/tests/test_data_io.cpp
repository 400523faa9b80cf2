#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "damrl/data/records.hpp"
#include "damrl/data/synthetic.hpp"
#include "support/test_helpers.hpp"

using namespace damrl;
using data::DailyRecord;

namespace {

std::vector<DailyRecord> parse(const std::string& text) {
    std::istringstream in(text);
    return data::parse_csv(in, "mem");
}

std::string error_of(const std::string& text) {
    std::istringstream in(text);
    try {
        data::parse_csv(in, "mem");
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

const char* kHeader = "date,rainfall_mm,water_level_m,inflow_bcm\n";

} // namespace

TEST_CASE("csv roundtrip is the identity") {
    std::vector<DailyRecord> records;
    records.push_back({Date{2018, 5, 31}, 0.0, 335.25, 0.001234});
    records.push_back({Date{2018, 6, 1}, 12.5, std::nullopt, 0.0});
    records.push_back({Date{2018, 6, 2}, 3.25, 335.5, std::nullopt});
    records.push_back({Date{2018, 6, 4}, 0.0, std::nullopt, std::nullopt}); // gap is legal

    testutil::TempDir tmp("records");
    const std::string path = tmp.path("r.csv");
    data::write_csv(records, path);
    const auto loaded = data::load_csv(path);

    REQUIRE(loaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(loaded[i].date.serial() == records[i].date.serial());
        CHECK(loaded[i].rainfall_mm == doctest::Approx(records[i].rainfall_mm).epsilon(1e-12));
        CHECK(loaded[i].water_level_m.has_value() == records[i].water_level_m.has_value());
        CHECK(loaded[i].inflow_bcm.has_value() == records[i].inflow_bcm.has_value());
    }
    // Bit-exact on the textual form: rewriting the loaded records reproduces
    // the file.
    CHECK(data::to_csv(loaded) == testutil::read_file(path));
}

TEST_CASE("csv parser accepts crlf and blank lines") {
    const std::string text = std::string(kHeader) +
                             "2020-01-01,1.500000,330.000000,0.000100\r\n"
                             "\r\n"
                             "2020-01-02,0.000000,,\r\n";
    const auto records = parse(text);
    REQUIRE(records.size() == 2);
    CHECK(records[0].rainfall_mm == doctest::Approx(1.5));
    CHECK(records[1].water_level_m == std::nullopt);
}

TEST_CASE("csv parser rejects bad input with file:line messages") {
    CHECK(error_of("").find("mem:1") != std::string::npos);
    CHECK(error_of("wrong,header\n").find("unexpected header") != std::string::npos);

    const std::string base(kHeader);
    SUBCASE("malformed row") {
        const auto msg = error_of(base + "2020-01-01\n");
        CHECK(msg.find("mem:2") != std::string::npos);
        CHECK(msg.find("malformed") != std::string::npos);
    }
    SUBCASE("bad date") {
        const auto msg = error_of(base + "2020-13-01,1.0,,\n");
        CHECK(msg.find("mem:2") != std::string::npos);
        CHECK(msg.find("bad date") != std::string::npos);
    }
    SUBCASE("duplicate date") {
        const auto msg =
            error_of(base + "2020-01-01,1.0,,\n2020-01-01,2.0,,\n");
        CHECK(msg.find("mem:3") != std::string::npos);
        CHECK(msg.find("does not increase") != std::string::npos);
    }
    SUBCASE("decreasing date") {
        const auto msg =
            error_of(base + "2020-01-02,1.0,,\n2020-01-01,2.0,,\n");
        CHECK(msg.find("mem:3") != std::string::npos);
    }
    SUBCASE("negative rainfall") {
        const auto msg = error_of(base + "2020-01-01,-0.5,,\n");
        CHECK(msg.find("negative rainfall") != std::string::npos);
    }
    SUBCASE("empty rainfall") {
        const auto msg = error_of(base + "2020-01-01,,330.0,\n");
        CHECK(msg.find("rainfall_mm") != std::string::npos);
    }
    SUBCASE("garbage number") {
        const auto msg = error_of(base + "2020-01-01,abc,,\n");
        CHECK(msg.find("mem:2") != std::string::npos);
    }
}

TEST_CASE("split_by_year partitions and validates") {
    std::vector<DailyRecord> records;
    for (int y = 2015; y <= 2019; ++y)
        for (int m = 1; m <= 12; ++m) records.push_back({Date{y, unsigned(m), 15}, 0.0, {}, {}});

    const auto [train, test] = data::split_by_year(records, 2017, 2019);
    CHECK(train.size() == 36); // 2015-2017
    CHECK(test.size() == 12);  // 2019 only
    for (const auto& r : train) CHECK(r.date.year() <= 2017);
    for (const auto& r : test) CHECK(r.date.year() == 2019);

    CHECK_THROWS_AS((void)data::split_by_year(records, 2019, 2019), std::invalid_argument);
    CHECK_THROWS_AS((void)data::split_by_year(records, 2020, 2019), std::invalid_argument);
    CHECK_THROWS_AS((void)data::split_by_year(records, 2010, 2011), std::invalid_argument);
    CHECK_THROWS_AS((void)data::split_by_year(records, 2017, 2030), std::invalid_argument);
}

TEST_CASE("derive_inflow fills gaps from level differences") {
    const auto curve = hydro::StageStorageCurve::bansagar();
    const double slope = curve.slope(); // BCM per metre

    std::vector<DailyRecord> records;
    records.push_back({Date{2020, 1, 1}, 0.0, 330.0, {}});
    records.push_back({Date{2020, 1, 2}, 0.0, 330.5, {}});       // +0.5 m
    records.push_back({Date{2020, 1, 3}, 0.0, 330.2, {}});       // -0.3 m
    records.push_back({Date{2020, 1, 4}, 0.0, std::nullopt, {}}); // no level
    records.push_back({Date{2020, 1, 5}, 0.0, 330.0, {}});       // prev has no level
    records.push_back({Date{2020, 1, 7}, 0.0, 331.0, {}});       // calendar gap
    records.push_back({Date{2020, 1, 8}, 0.0, 331.0, 0.42});     // already present

    SUBCASE("without release volumes") {
        const auto out = data::derive_inflow(records, curve);
        CHECK(!out[0].inflow_bcm.has_value());
        REQUIRE(out[1].inflow_bcm.has_value());
        CHECK(*out[1].inflow_bcm == doctest::Approx(0.5 * slope).epsilon(1e-9));
        REQUIRE(out[2].inflow_bcm.has_value());
        CHECK(*out[2].inflow_bcm == 0.0); // negative difference floors at 0
        CHECK(!out[3].inflow_bcm.has_value());
        CHECK(!out[4].inflow_bcm.has_value());
        CHECK(!out[5].inflow_bcm.has_value()); // gapped day is left alone
        CHECK(*out[6].inflow_bcm == doctest::Approx(0.42));
    }
    SUBCASE("release volumes are added back") {
        std::vector<double> released(records.size(), 0.01);
        const auto out = data::derive_inflow(records, curve, released);
        CHECK(*out[1].inflow_bcm == doctest::Approx(0.5 * slope + 0.01).epsilon(1e-9));
        CHECK(*out[2].inflow_bcm ==
              doctest::Approx(std::max(0.0, -0.3 * slope + 0.01)).epsilon(1e-9));
        CHECK(*out[6].inflow_bcm == doctest::Approx(0.42)); // still untouched
    }
    SUBCASE("length mismatch is rejected") {
        std::vector<double> released(3, 0.0);
        CHECK_THROWS_AS((void)data::derive_inflow(records, curve, released),
                        std::invalid_argument);
    }
}

TEST_CASE("synthetic generator is deterministic in the seed") {
    auto cfg = data::SyntheticConfig::monsoon_preset(123, 2015, 2);
    const auto a = data::synthesize(cfg);
    const auto b = data::synthesize(cfg);
    CHECK(data::to_csv(a) == data::to_csv(b));

    cfg.seed = 124;
    const auto c = data::synthesize(cfg);
    CHECK(data::to_csv(a) != data::to_csv(c));
}

TEST_CASE("synthetic zero intensity produces all-zero rainfall and inflow") {
    data::SyntheticConfig cfg; // every month defaults to wet_probability 0
    cfg.seed = 5;
    cfg.years = 1;
    const auto records = data::synthesize(cfg);
    REQUIRE(records.size() == 366); // 2012 is a leap year
    for (const auto& r : records) {
        CHECK(r.rainfall_mm == 0.0);
        CHECK(*r.inflow_bcm == 0.0);
    }
}

TEST_CASE("synthetic covers full calendar years") {
    auto cfg = data::SyntheticConfig::monsoon_preset(9, 2012, 2); // 2012 is a leap year
    const auto records = data::synthesize(cfg);
    CHECK(records.size() == 366 + 365);
    CHECK(records.front().date.serial() == Date{2012, 1, 1}.serial());
    CHECK(records.back().date.serial() == Date{2013, 12, 31}.serial());
    for (std::size_t i = 1; i < records.size(); ++i)
        CHECK(days_between(records[i - 1].date, records[i].date) == 1);
}

TEST_CASE("synthetic rainfall concentrates in the monsoon months") {
    auto cfg = data::SyntheticConfig::monsoon_preset(77, 2010, 10);
    const auto records = data::synthesize(cfg);
    double total = 0.0, monsoon = 0.0;
    const std::set<unsigned> monsoon_months(cfg.monsoon_months.begin(),
                                            cfg.monsoon_months.end());
    for (const auto& r : records) {
        total += r.rainfall_mm;
        if (monsoon_months.count(r.date.month())) monsoon += r.rainfall_mm;
    }
    REQUIRE(total > 0.0);
    CHECK(monsoon / total >= 0.80);
}

TEST_CASE("synthetic inflow is non-negative and zero on long dry stretches") {
    auto cfg = data::SyntheticConfig::monsoon_preset(31, 2014, 4);
    const auto records = data::synthesize(cfg);
    const int memory = static_cast<int>(cfg.lag_kernel.size());
    int zero_checked = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        REQUIRE(records[i].inflow_bcm.has_value());
        CHECK(*records[i].inflow_bcm >= 0.0);
        // After `memory` dry days the kernel has nothing left to convolve.
        if (i + 1 >= static_cast<std::size_t>(memory)) {
            bool dry = true;
            for (int j = 0; j < memory; ++j)
                if (records[i - static_cast<std::size_t>(j)].rainfall_mm > 0.0) dry = false;
            if (dry) {
                CHECK(*records[i].inflow_bcm == 0.0);
                ++zero_checked;
            }
        }
    }
    CHECK(zero_checked > 50); // the dry season supplies plenty of such runs
}

TEST_CASE("synthetic levels respect dead storage and capacity") {
    auto cfg = data::SyntheticConfig::monsoon_preset(42, 2012, 5);
    cfg.initial_level_m = 341.5;
    const auto records = data::synthesize(cfg);
    const auto curve = cfg.params.curve();
    const double dead_level = curve.level_from_storage(cfg.params.dam_base_water).meters;
    for (const auto& r : records) {
        REQUIRE(r.water_level_m.has_value());
        CHECK(*r.water_level_m >= dead_level - 1e-9);
        CHECK(*r.water_level_m <= cfg.params.dam_cap.meters + 1e-9);
    }
}

TEST_CASE("synthetic config validation") {
    auto cfg = data::SyntheticConfig::monsoon_preset(1, 2012, 1);
    cfg.years = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = data::SyntheticConfig::monsoon_preset(1, 2012, 1);
    cfg.noise_rho = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = data::SyntheticConfig::monsoon_preset(1, 2012, 1);
    cfg.lag_kernel.clear();
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = data::SyntheticConfig::monsoon_preset(1, 2012, 1);
    cfg.month[0].wet_probability = -0.1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
