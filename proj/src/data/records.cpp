#include "damrl/data/records.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace damrl::data {

namespace {

[[noreturn]] void fail(const std::string& name, int line_no, const std::string& what) {
    throw std::runtime_error(name + ":" + std::to_string(line_no) + ": " + what);
}

std::optional<double> parse_optional_real(const std::string& text, const std::string& name,
                                          int line_no, const char* field) {
    if (text.empty()) return std::nullopt;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || !std::isfinite(v)) {
        fail(name, line_no, std::string("bad ") + field + " value '" + text + "'");
    }
    return v;
}

constexpr const char* kHeader = "date,rainfall_mm,water_level_m,inflow_bcm";

} // namespace

std::vector<DailyRecord> parse_csv(std::istream& in, const std::string& name) {
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) fail(name, 1, "empty file");
    ++line_no;
    if (line.ends_with("\r")) line.pop_back();
    if (line != kHeader) {
        fail(name, 1, "unexpected header '" + line + "' (expected '" + std::string(kHeader) + "')");
    }
    std::vector<DailyRecord> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.ends_with("\r")) line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string date_text, rain_text, level_text, inflow_text;
        if (!std::getline(row, date_text, ',') || !std::getline(row, rain_text, ',')) {
            fail(name, line_no, "malformed row '" + line + "'");
        }
        // Trailing optional fields may be absent entirely.
        std::getline(row, level_text, ',');
        std::getline(row, inflow_text);

        DailyRecord rec;
        auto date = Date::parse(date_text);
        if (!date) fail(name, line_no, "bad date '" + date_text + "' (expected YYYY-MM-DD)");
        rec.date = *date;
        if (!out.empty() && !(out.back().date < rec.date)) {
            fail(name, line_no,
                 "date " + rec.date.to_string() + " does not increase past " +
                     out.back().date.to_string());
        }
        auto rain = parse_optional_real(rain_text, name, line_no, "rainfall_mm");
        if (!rain) fail(name, line_no, "rainfall_mm must not be empty");
        if (*rain < 0.0) fail(name, line_no, "negative rainfall " + rain_text);
        rec.rainfall_mm = *rain;
        rec.water_level_m = parse_optional_real(level_text, name, line_no, "water_level_m");
        rec.inflow_bcm = parse_optional_real(inflow_text, name, line_no, "inflow_bcm");
        out.push_back(rec);
    }
    return out;
}

std::vector<DailyRecord> load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open data file: " + path);
    return parse_csv(in, path);
}

std::string to_csv(const std::vector<DailyRecord>& records) {
    std::string out(kHeader);
    out += '\n';
    char buf[64];
    for (const auto& r : records) {
        out += r.date.to_string();
        std::snprintf(buf, sizeof buf, ",%.6f,", r.rainfall_mm);
        out += buf;
        if (r.water_level_m) {
            std::snprintf(buf, sizeof buf, "%.6f", *r.water_level_m);
            out += buf;
        }
        out += ',';
        if (r.inflow_bcm) {
            std::snprintf(buf, sizeof buf, "%.6f", *r.inflow_bcm);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::vector<DailyRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write data file: " + path);
    out << to_csv(records);
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::pair<std::vector<DailyRecord>, std::vector<DailyRecord>>
split_by_year(const std::vector<DailyRecord>& records, int train_end_year, int test_year) {
    if (train_end_year >= test_year) {
        throw std::invalid_argument("split_by_year: train_end_year " +
                                    std::to_string(train_end_year) +
                                    " must precede test_year " + std::to_string(test_year));
    }
    std::vector<DailyRecord> train, test;
    for (const auto& r : records) {
        if (r.date.year() <= train_end_year) train.push_back(r);
        if (r.date.year() == test_year) test.push_back(r);
    }
    if (train.empty()) {
        throw std::invalid_argument("split_by_year: no records on or before year " +
                                    std::to_string(train_end_year));
    }
    if (test.empty()) {
        throw std::invalid_argument("split_by_year: no records in year " +
                                    std::to_string(test_year));
    }
    return {std::move(train), std::move(test)};
}

std::vector<DailyRecord> derive_inflow(std::vector<DailyRecord> records,
                                       const hydro::StageStorageCurve& curve,
                                       std::span<const double> released_bcm) {
    if (!released_bcm.empty() && released_bcm.size() != records.size()) {
        throw std::invalid_argument("derive_inflow: released series length " +
                                    std::to_string(released_bcm.size()) +
                                    " does not match record count " +
                                    std::to_string(records.size()));
    }
    for (std::size_t i = 1; i < records.size(); ++i) {
        auto& rec = records[i];
        if (rec.inflow_bcm) continue;
        const auto& prev = records[i - 1];
        if (!rec.water_level_m || !prev.water_level_m) continue;
        if (days_between(prev.date, rec.date) != 1) continue; // gap in the series
        const double s1 = curve.storage_from_level({*rec.water_level_m}).bcm;
        const double s0 = curve.storage_from_level({*prev.water_level_m}).bcm;
        const double released = released_bcm.empty() ? 0.0 : released_bcm[i];
        rec.inflow_bcm = std::max(0.0, s1 - s0 + released);
    }
    return records;
}

} // namespace damrl::data
