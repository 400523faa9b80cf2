#include "damrl/policy/schedule.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace damrl::policy {

const std::array<SchedulePeriod, 24>& baseline_schedule() {
    static const std::array<SchedulePeriod, 24> table = {{
        {{11, 1}, {11, 10}, 73.1},  {{11, 11}, {11, 20}, 68.6}, {{11, 21}, {11, 30}, 64.1},
        {{12, 1}, {12, 10}, 59.6},  {{12, 11}, {12, 20}, 55.1}, {{12, 21}, {12, 31}, 48.5},
        {{1, 1}, {1, 10}, 41.8},    {{1, 11}, {1, 20}, 35.2},   {{1, 21}, {1, 31}, 33.6},
        {{2, 1}, {2, 10}, 31.9},    {{2, 11}, {2, 20}, 30.3},   {{2, 21}, {2, 28}, 29.2},
        {{3, 1}, {3, 10}, 28.1},    {{3, 11}, {3, 20}, 27.0},   {{3, 21}, {3, 31}, 23.8},
        {{4, 1}, {4, 10}, 20.5},    {{4, 11}, {4, 20}, 17.3},   {{4, 21}, {4, 30}, 16.1},
        {{5, 1}, {5, 10}, 14.9},    {{5, 11}, {5, 20}, 13.7},   {{5, 21}, {5, 31}, 12.5},
        {{6, 1}, {6, 10}, 11.3},    {{6, 11}, {6, 20}, 57.6},   {{6, 21}, {6, 30}, 104.0},
    }};
    return table;
}

int lookup_period(Date date) {
    const unsigned m = date.month();
    const unsigned d = date.day();
    // Months in schedule order: Nov, Dec, Jan, Feb, Mar, Apr, May, Jun.
    int month_slot = -1;
    switch (m) {
        case 11: month_slot = 0; break;
        case 12: month_slot = 1; break;
        case 1: month_slot = 2; break;
        case 2: month_slot = 3; break;
        case 3: month_slot = 4; break;
        case 4: month_slot = 5; break;
        case 5: month_slot = 6; break;
        case 6: month_slot = 7; break;
        default:
            throw std::out_of_range("lookup_period: " + date.to_string() +
                                    " is outside the Nov-Jun discharge schedule");
    }
    // Third slot of each month absorbs days 21 through month end.
    const int ten_daily = d <= 10 ? 0 : (d <= 20 ? 1 : 2);
    return month_slot * 3 + ten_daily;
}

std::optional<double> schedule_discharge(const std::array<SchedulePeriod, 24>& schedule, Date date) {
    const unsigned m = date.month();
    if (m >= 7 && m <= 10) return std::nullopt;
    return schedule[static_cast<std::size_t>(lookup_period(date))].discharge_cumecs;
}

namespace {

MonthDay parse_month_day(const std::string& text, const std::string& path, int line_no) {
    unsigned m = 0, d = 0;
    if (std::sscanf(text.c_str(), "%u-%u", &m, &d) != 2 || m < 1 || m > 12 || d < 1 ||
        d > days_in_month(2001, m) + (m == 2 ? 1u : 0u)) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": bad period bound '" + text + "' (expected MM-DD)");
    }
    return MonthDay{m, d};
}

} // namespace

std::array<SchedulePeriod, 24> load_schedule_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schedule file: " + path);
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty schedule file");
    ++line_no;
    if (line.ends_with("\r")) line.pop_back();
    if (line != "period_start,period_end,discharge_cumecs") {
        throw std::runtime_error(path + ":1: unexpected header '" + line + "'");
    }
    std::array<SchedulePeriod, 24> out{};
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.ends_with("\r")) line.pop_back();
        if (line.empty()) continue;
        if (rows >= out.size()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": schedule has more than 24 rows");
        }
        std::istringstream row(line);
        std::string start_text, end_text, q_text;
        if (!std::getline(row, start_text, ',') || !std::getline(row, end_text, ',') ||
            !std::getline(row, q_text)) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row '" +
                                     line + "'");
        }
        SchedulePeriod p;
        p.start = parse_month_day(start_text, path, line_no);
        p.end = parse_month_day(end_text, path, line_no);
        std::size_t used = 0;
        p.discharge_cumecs = std::stod(q_text, &used);
        if (used != q_text.size() || p.discharge_cumecs < 0.0) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": bad discharge '" + q_text + "'");
        }
        out[rows++] = p;
    }
    if (rows != out.size()) {
        throw std::runtime_error(path + ": expected 24 schedule rows, found " +
                                 std::to_string(rows));
    }
    // The table must be usable through lookup_period: row i covers dates that
    // map to index i.
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Date probe(2001, out[i].start.month, out[i].start.day);
        if (lookup_period(probe) != static_cast<int>(i)) {
            throw std::runtime_error(path + ": row " + std::to_string(i + 1) +
                                     " does not match the ten-daily period layout");
        }
    }
    return out;
}

void write_schedule_csv(const std::array<SchedulePeriod, 24>& schedule, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write schedule file: " + path);
    out << "period_start,period_end,discharge_cumecs\n";
    char buf[64];
    for (const auto& p : schedule) {
        std::snprintf(buf, sizeof buf, "%02u-%02u,%02u-%02u,%.6f\n", p.start.month, p.start.day,
                      p.end.month, p.end.day, p.discharge_cumecs);
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace damrl::policy
