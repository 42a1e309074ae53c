#pragma once

// Hourly real-time electricity prices: ingestion, validation and the
// per-hour-of-day statistics the peak predictor is trained on.

#include "peakpause/calendar.hpp"

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace peakpause {

struct PricePoint {
    DateTime timestamp;
    double price; // $/kWh, may be negative

    friend bool operator==(const PricePoint&, const PricePoint&) = default;
};

/// Contiguous hourly prices. Stored as a start hour plus a dense vector, so
/// point i sits at start + i hours; this makes the contiguity invariant structural.
class PriceSeries {
public:
    PriceSeries(DateTime start, Eigen::VectorXd prices, std::string source_label = {},
                std::vector<DateTime> imputed = {});

    /// Validates strictly increasing, gap-free, hour-aligned timestamps.
    static PriceSeries from_points(const std::vector<PricePoint>& points,
                                   std::string source_label = {});

    std::size_t size() const noexcept { return static_cast<std::size_t>(prices_.size()); }
    DateTime start() const noexcept { return start_; }
    /// One past the last hour.
    DateTime end() const noexcept { return start_ + Hours{prices_.size()}; }
    Interval span() const noexcept { return {start(), end()}; }

    const Eigen::VectorXd& prices() const noexcept { return prices_; }
    PricePoint point(std::size_t i) const;
    std::vector<PricePoint> points() const;

    bool covers(DateTime t) const noexcept { return start_ <= t && t < end(); }
    /// Price in effect at t (the hour containing t). Requires covers(t).
    double price_at(DateTime t) const;

    const std::string& source_label() const noexcept { return label_; }
    /// Hours filled in by gap imputation, empty for clean input.
    const std::vector<DateTime>& imputed_hours() const noexcept { return imputed_; }

    /// Sub-series of the hours inside window; throws if the overlap is empty.
    PriceSeries slice(Interval window) const;

    /// Days for which all 24 hours are present, in order.
    std::vector<Date> complete_days() const;
    bool all_days_complete() const;
    /// The 24 prices of a complete day.
    Eigen::Matrix<double, 24, 1> day_prices(Date day) const;

    friend bool operator==(const PriceSeries& a, const PriceSeries& b)
    {
        return a.start_ == b.start_ && a.prices_.size() == b.prices_.size()
               && a.prices_ == b.prices_;
    }

private:
    DateTime start_;
    Eigen::VectorXd prices_;
    std::string label_;
    std::vector<DateTime> imputed_;
};

struct HourlyProfile {
    Eigen::Array<double, 24, 1> mean_price_by_hour;
    std::array<std::size_t, 24> sample_count_by_hour{};
};

enum class CsvLayout { long_form, wide };
enum class GapPolicy { reject, impute_hour_mean };

/// Long: `timestamp,price_usd_per_kwh` with `YYYY-MM-DDTHH:00` stamps.
/// Wide: `date,h00,...,h23`; an empty cell is a missing hour.
PriceSeries parse_price_csv(std::string_view text, CsvLayout layout,
                            GapPolicy gaps = GapPolicy::reject, std::string source_label = {});

/// Canonical long-form CSV; prices written in shortest round-trip form.
std::string to_long_csv(const PriceSeries& series);

HourlyProfile hourly_profile(const PriceSeries& series, Interval window);
inline HourlyProfile hourly_profile(const PriceSeries& series)
{
    return hourly_profile(series, series.span());
}

/// count[h] = days on which hour h is among that day's top_k prices
/// (ties: the earlier hour ranks higher).
std::array<std::size_t, 24> peak_hour_histogram(const PriceSeries& series, int top_k);

struct PriceSummary {
    std::size_t hours = 0;
    std::size_t complete_days = 0;
    int hours_of_day_covered = 0; // out of 24
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t imputed = 0;
};

PriceSummary summarize(const PriceSeries& series);

/// Hours of one day ordered from most to least expensive, earlier hour first on ties.
std::array<int, 24> rank_hours(const Eigen::Ref<const Eigen::Matrix<double, 24, 1>>& day);

} // namespace peakpause
