#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "damrl/common/date.hpp"

namespace damrl::policy {

/// One ten-daily row of the discharge schedule. Periods are keyed by month
/// and day only; the third period of each month absorbs days 21 to month end
/// (Feb 29 therefore falls in the "Feb 21-28" row).
struct SchedulePeriod {
    MonthDay start;
    MonthDay end;
    double discharge_cumecs = 0.0;
};

/// The human baseline discharge table, Nov 01 through Jun 30, 24 rows.
const std::array<SchedulePeriod, 24>& baseline_schedule();

/// 0-based row index of the period containing `date` (Nov 01-10 -> 0, ...,
/// Jun 21-30 -> 23). Throws std::out_of_range for dates outside Nov-Jun.
int lookup_period(Date date);

/// Discharge for dates covered by the schedule; nullopt outside Nov-Jun.
std::optional<double> schedule_discharge(const std::array<SchedulePeriod, 24>& schedule, Date date);

/// CSV round trip, header: period_start,period_end,discharge_cumecs with
/// MM-DD period bounds.
std::array<SchedulePeriod, 24> load_schedule_csv(const std::string& path);
void write_schedule_csv(const std::array<SchedulePeriod, 24>& schedule, const std::string& path);

} // namespace damrl::policy
