#pragma once

// Naive market-local date-times. No timezone conversion is ever applied;
// a timestamp means whatever wall-clock time the price feed used.

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace peakpause {

using DateTime = std::chrono::local_seconds;
using Date = std::chrono::local_days;
using Seconds = std::chrono::seconds;
using Hours = std::chrono::hours;

/// Half-open interval [begin, end).
struct Interval {
    DateTime begin;
    DateTime end;

    bool contains(DateTime t) const noexcept { return begin <= t && t < end; }
    bool empty() const noexcept { return end <= begin; }
    Seconds length() const noexcept { return end - begin; }
};

inline int hour_of_day(DateTime t) noexcept
{
    const auto since_midnight = t - std::chrono::floor<std::chrono::days>(t);
    return static_cast<int>(std::chrono::duration_cast<Hours>(since_midnight).count());
}

inline Date day_of(DateTime t) noexcept { return std::chrono::floor<std::chrono::days>(t); }

inline DateTime floor_hour(DateTime t) noexcept { return std::chrono::floor<Hours>(t); }

inline bool is_hour_aligned(DateTime t) noexcept { return floor_hour(t) == t; }

DateTime make_datetime(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                       int second = 0);

/// Shift by whole calendar months; the day is clamped to the target month's length.
Date add_months(Date d, int months);

// Parsers return nullopt on malformed or out-of-range input.
std::optional<Date> parse_date(std::string_view text); // YYYY-MM-DD
/// YYYY-MM-DD, YYYY-MM-DDTHH:MM or YYYY-MM-DDTHH:MM:SS ('T' or ' ' separator).
std::optional<DateTime> parse_datetime(std::string_view text);

/// "FROM/TO" with either side a date or date-time; half-open.
std::optional<Interval> parse_interval(std::string_view text);

std::string format_date(Date d);
std::string format_hour_stamp(DateTime t);
std::string format_iso_seconds(DateTime t);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
std::optional<double> parse_double(std::string_view text);

} // namespace peakpause
