#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "damrl/common/date.hpp"
#include "damrl/hydro/stage_storage.hpp"

namespace damrl::data {

/// One day of observations. Rainfall is always present; level and inflow are
/// optional because raw gauge exports often carry only a subset.
struct DailyRecord {
    Date date;
    double rainfall_mm = 0.0;
    std::optional<double> water_level_m;
    std::optional<double> inflow_bcm;
};

/// Parse records from CSV text. Header must be exactly
/// `date,rainfall_mm,water_level_m,inflow_bcm`; optional fields may be empty.
/// Rejects (with `name:line:` prefixed messages): malformed rows, negative
/// rainfall, and dates that do not strictly increase (which also catches
/// duplicates). `name` is used only for error messages.
std::vector<DailyRecord> parse_csv(std::istream& in, const std::string& name);
std::vector<DailyRecord> load_csv(const std::string& path);

/// Serialize with the same header; reals printed with %.6f, missing fields
/// empty. write_csv(load_csv(p)) reproduces a file written by write_csv
/// byte for byte.
std::string to_csv(const std::vector<DailyRecord>& records);
void write_csv(const std::vector<DailyRecord>& records, const std::string& path);

/// Split into (train, test): train = records with date.year() <= train_end_year,
/// test = records with date.year() == test_year. Throws std::invalid_argument
/// when train_end_year >= test_year or either partition is empty.
std::pair<std::vector<DailyRecord>, std::vector<DailyRecord>>
split_by_year(const std::vector<DailyRecord>& records, int train_end_year, int test_year);

/// Fill missing inflow_bcm from successive water levels:
///   inflow_t = max(0, storage(level_t) - storage(level_{t-1}) + released_t)
/// with released_t taken from `released_bcm` when provided (same length as
/// records) and 0 otherwise. The first record and records lacking a level on
/// either side keep inflow absent. Records with inflow already present are
/// left untouched.
std::vector<DailyRecord> derive_inflow(std::vector<DailyRecord> records,
                                       const hydro::StageStorageCurve& curve,
                                       std::span<const double> released_bcm = {});

} // namespace damrl::data
