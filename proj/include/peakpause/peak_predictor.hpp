#pragma once

// Expensive-hour selection: rank hours of the day by mean historical price
// and pause during the top n = ceil(downtime_ratio * 24) of them.

#include "peakpause/calendar.hpp"
#include "peakpause/price_data.hpp"

#include <bitset>
#include <string>
#include <vector>

namespace peakpause {

class ExpensiveHourPolicy {
public:
    /// Empty policy (downtime ratio 0).
    ExpensiveHourPolicy() = default;
    /// Validates |hours| == hour_count(downtime_ratio), all in 0..23 and distinct.
    ExpensiveHourPolicy(double downtime_ratio, const std::vector<int>& hours, std::string trained_on = {});

    double downtime_ratio() const noexcept { return ratio_; }
    int n() const noexcept { return static_cast<int>(hours_.count()); }
    /// Ascending hour-of-day values.
    std::vector<int> expensive_hours() const;
    bool contains(int hour) const noexcept { return hour >= 0 && hour < 24 && hours_.test(static_cast<std::size_t>(hour)); }
    const std::string& trained_on() const noexcept { return trained_on_; }

    friend bool operator==(const ExpensiveHourPolicy& a, const ExpensiveHourPolicy& b)
    {
        return a.ratio_ == b.ratio_ && a.hours_ == b.hours_ && a.trained_on_ == b.trained_on_;
    }

private:
    double ratio_ = 0.0;
    std::bitset<24> hours_;
    std::string trained_on_;
};

/// ceil(downtime_ratio * 24); throws outside [0,1]. A 1e-9 slack absorbs
/// representation error so that e.g. 7/24 maps to 7, not 8.
int hour_count(double downtime_ratio);

ExpensiveHourPolicy find_expensive_hours(const HourlyProfile& profile, double downtime_ratio,
                                         std::string trained_on = {});

/// Trains on series restricted to window.
ExpensiveHourPolicy train_policy(const PriceSeries& series, Interval window, double downtime_ratio);

/// Default history: the calendar months preceding target_day, target_day excluded.
Interval history_window(Date target_day, int months = 3);

inline bool is_expensive(const ExpensiveHourPolicy& policy, DateTime now)
{
    return policy.contains(hour_of_day(now));
}

struct OracleOptions {
    /// Retrain before every test day on the history window preceding it
    /// (drawn from history and earlier test days). Off: one policy from all of history.
    bool retrain_daily = false;
    int window_months = 3;
};

struct OracleComparison {
    double rmse = 0.0;           // $/kWh
    double relative_error = 0.0; // rmse / |mean(S_opt)|
    std::size_t days = 0;
    std::vector<double> predicted_sums; // S_pred(d)
    std::vector<double> optimal_sums;   // S_opt(d)
    ExpensiveHourPolicy policy;         // last policy used
};

/// Sum of prices over predicted hours vs. the a-priori best n hours of each test day.
OracleComparison evaluate_vs_oracle(const PriceSeries& history, const PriceSeries& test,
                                    double downtime_ratio, const OracleOptions& options = {});

} // namespace peakpause
