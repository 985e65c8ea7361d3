#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace maintcast {

/// UTC calendar date. Time of day never survives parsing.
using Date = std::chrono::sys_days;

Date make_date(int year, unsigned month, unsigned day);

/// Parses `YYYY-MM-DD` or an ISO-8601 datetime
/// (`YYYY-MM-DDTHH:MM[:SS[.fff]][Z|+HH:MM|-HH:MM]`). Datetimes with an offset
/// are converted to UTC before truncation. Returns nullopt for anything that
/// is not a real calendar instant.
std::optional<Date> parse_iso_date(std::string_view text);

std::string format_date(Date d);

inline std::int64_t days_between(Date from, Date to) { return (to - from).count(); }
inline Date add_days(Date d, std::int64_t n) { return d + std::chrono::days{n}; }

/// Inclusive range of days.
struct DateRange {
    Date first;
    Date last;

    std::int64_t size() const { return days_between(first, last) + 1; }
    bool empty() const { return last < first; }
    bool contains(Date d) const { return first <= d && d <= last; }
    std::int64_t index_of(Date d) const { return days_between(first, d); }
    Date at(std::int64_t i) const { return add_days(first, i); }
};

int year_of(Date d);
unsigned month_of(Date d);

}  // namespace maintcast
