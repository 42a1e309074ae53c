#include "peakpause/peak_predictor.hpp"

#include "peakpause/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace peakpause {

int hour_count(double downtime_ratio)
{
    if (!(downtime_ratio >= 0.0 && downtime_ratio <= 1.0))
        throw ValidationError("downtime_ratio must be in [0,1], got " + format_double(downtime_ratio));
    return static_cast<int>(std::ceil(downtime_ratio * 24.0 - 1e-9));
}

ExpensiveHourPolicy::ExpensiveHourPolicy(double downtime_ratio, const std::vector<int>& hours,
                                         std::string trained_on)
    : ratio_(downtime_ratio), trained_on_(std::move(trained_on))
{
    const int n = hour_count(downtime_ratio);
    for (int h : hours) {
        if (h < 0 || h > 23)
            throw ValidationError("expensive hour " + std::to_string(h) + " is outside 0..23");
        if (hours_.test(static_cast<std::size_t>(h)))
            throw ValidationError("expensive hour " + std::to_string(h) + " listed twice");
        hours_.set(static_cast<std::size_t>(h));
    }
    if (static_cast<int>(hours.size()) != n)
        throw ValidationError("downtime_ratio " + format_double(downtime_ratio) + " requires "
                              + std::to_string(n) + " expensive hours, got " + std::to_string(hours.size()));
}

std::vector<int> ExpensiveHourPolicy::expensive_hours() const
{
    std::vector<int> out;
    for (int h = 0; h < 24; ++h)
        if (hours_.test(static_cast<std::size_t>(h)))
            out.push_back(h);
    return out;
}

ExpensiveHourPolicy find_expensive_hours(const HourlyProfile& profile, double downtime_ratio,
                                         std::string trained_on)
{
    const int n = hour_count(downtime_ratio);
    if (!profile.mean_price_by_hour.allFinite())
        throw ValidationError("hourly profile contains non-finite means");
    const auto order = rank_hours(profile.mean_price_by_hour.matrix());
    std::vector<int> hours(order.begin(), order.begin() + n);
    return ExpensiveHourPolicy(downtime_ratio, hours, std::move(trained_on));
}

ExpensiveHourPolicy train_policy(const PriceSeries& series, Interval window, double downtime_ratio)
{
    const auto profile = hourly_profile(series, window);
    std::string desc = "[" + format_hour_stamp(std::max(window.begin, series.start())) + ", "
                       + format_hour_stamp(std::min(window.end, series.end())) + ")";
    if (!series.source_label().empty())
        desc += " of " + series.source_label();
    return find_expensive_hours(profile, downtime_ratio, std::move(desc));
}

Interval history_window(Date target_day, int months)
{
    if (months < 1)
        throw ValidationError("history window must span at least one month");
    return {DateTime{add_months(target_day, -months)}, DateTime{target_day}};
}

OracleComparison evaluate_vs_oracle(const PriceSeries& history, const PriceSeries& test,
                                    double downtime_ratio, const OracleOptions& options)
{
    if (!test.all_days_complete())
        throw ValidationError("oracle evaluation needs complete test days; test series starts at "
                              + format_hour_stamp(test.start()) + " with " + std::to_string(test.size())
                              + " hours");
    const int n = hour_count(downtime_ratio);

    OracleComparison out;
    out.policy = train_policy(history, history.span(), downtime_ratio);

    // History and test merged for daily retraining.
    std::optional<PriceSeries> combined;
    if (options.retrain_daily) {
        if (test.start() != history.end())
            throw ValidationError("daily retraining needs the test series to directly follow the history");
        Eigen::VectorXd all(static_cast<Eigen::Index>(history.size() + test.size()));
        all << history.prices(), test.prices();
        combined.emplace(history.start(), std::move(all), history.source_label());
    }

    double sq = 0.0;
    double opt_total = 0.0;
    for (auto day : test.complete_days()) {
        if (combined)
            out.policy = train_policy(*combined, history_window(day, options.window_months), downtime_ratio);
        const auto prices = test.day_prices(day);
        double predicted = 0.0;
        for (int h : out.policy.expensive_hours())
            predicted += prices[h];
        // Both sums run in ascending hour order so equal hour sets give equal sums.
        auto order = rank_hours(prices);
        std::sort(order.begin(), order.begin() + n);
        double optimal = 0.0;
        for (int k = 0; k < n; ++k)
            optimal += prices[order[static_cast<std::size_t>(k)]];
        out.predicted_sums.push_back(predicted);
        out.optimal_sums.push_back(optimal);
        sq += (optimal - predicted) * (optimal - predicted);
        opt_total += optimal;
    }
    out.days = out.optimal_sums.size();
    if (out.days == 0)
        throw ValidationError("test series contains no complete day");
    out.rmse = std::sqrt(sq / static_cast<double>(out.days));
    const double mean_opt = std::abs(opt_total / static_cast<double>(out.days));
    out.relative_error = out.rmse == 0.0 ? 0.0 : out.rmse / mean_opt;
    return out;
}

} // namespace peakpause
