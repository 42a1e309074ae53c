#pragma once

// Energy and electricity-cost integration of power traces, baseline vs.
// scheduled savings, carbon charge-back and green-instance price quotes.

#include "peakpause/calendar.hpp"
#include "peakpause/peak_predictor.hpp"
#include "peakpause/power_model.hpp"
#include "peakpause/price_data.hpp"

#include <Eigen/Core>

#include <vector>

namespace peakpause {

struct EnergyCostResult {
    double energy = 0.0; // kWh
    double cost = 0.0;   // $
    Interval interval{};
    Eigen::Index samples_used = 0;
};

/// Left rectangle rule with step (t_N - t_0) / N = sample interval:
/// cost = sum_i dt * P_i * C(t_i), energy = sum_i dt * P_i.
EnergyCostResult integrate_cost(const PowerTrace& trace, const PriceSeries& prices);

/// The same sums over raw vectors; dt in hours, power in W, prices in $/kWh.
template <typename PowerDerived, typename PriceDerived>
std::pair<typename PowerDerived::Scalar, typename PowerDerived::Scalar>
rectangle_energy_cost(const Eigen::MatrixBase<PowerDerived>& power, const Eigen::MatrixBase<PriceDerived>& price,
                      typename PowerDerived::Scalar step_seconds)
{
    using Scalar = typename PowerDerived::Scalar;
    // Sum first, scale once: integer-valued inputs then integrate exactly.
    const Scalar scale = step_seconds / Scalar(3.6e6);
    return {power.sum() * scale, power.dot(price) * scale};
}

struct SavingsReport {
    EnergyCostResult baseline;
    EnergyCostResult scheduled;
    double energy_savings = 0.0; // fraction
    double cost_savings = 0.0;   // fraction
    double availability = 1.0;   // 1 - paused hours / total hours
    double cpu_time_lost = 0.0;  // n / 24
    double peak_power = 0.0;     // W, of the model compared
    double idle_ratio = 0.0;
};

/// Baseline (always running) vs. scheduled trace over interval, with shared
/// noise draws so the difference reflects only the schedule.
SavingsReport compare(const ServerPowerModel& model, const ExpensiveHourPolicy& policy,
                      const PriceSeries& prices, Interval interval, Seconds sample_interval = Seconds{5});

/// Savings from two measured traces (e.g. wattmeter exports with and without the scheduler).
SavingsReport compare_traces(const PowerTrace& baseline, const PowerTrace& scheduled,
                             const ExpensiveHourPolicy& policy, const PriceSeries& prices);

struct SavingsCell {
    double peak_power = 0.0;
    double idle_ratio = 0.0;
    double energy_savings = 0.0;
    double cost_savings = 0.0;
};

/// rows = idle ratios, columns = peak powers.
struct SavingsTable {
    std::vector<double> peak_powers;
    std::vector<double> idle_ratios;
    std::vector<std::vector<SavingsCell>> cells; // [idle][peak]
};

struct SweepOptions {
    double noise_sigma = 2.0;
    std::uint64_t seed = 1;
    Seconds sample_interval{5};
    /// Cell (r, c) uses seed + r * columns + c; otherwise every cell uses seed.
    bool per_cell_seeds = true;
    bool parallel = true;
};

SavingsTable savings_table(const std::vector<double>& peak_powers, const std::vector<double>& idle_ratios,
                           const ExpensiveHourPolicy& policy, const PriceSeries& prices, Interval interval,
                           const SweepOptions& options = {});

/// CSV: `idle_ratio,energy_<P>W,...,cost_<P>W,...` with percentages.
std::string savings_table_csv(const SavingsTable& table);

struct EmissionParams {
    double cef = 0.0; // kg CO2e / kWh
    double pue = 1.0;

    void validate() const;
};

inline constexpr double kKilogramsPerPound = 0.45359237;

/// lb/MWh to kg/kWh.
inline double cef_from_lb_per_mwh(double lb_per_mwh) { return lb_per_mwh * kKilogramsPerPound / 1000.0; }

/// EC = CEF * PUE * energy, in kg CO2e.
double environmental_chargeback(double energy_kwh, const EmissionParams& params);

struct GreenSlaQuote {
    double availability = 1.0;
    double hourly_price = 0.0;               // $/h
    double annual_chargeback = 0.0;          // kg CO2e, green instance
    double chargeback_delta_vs_normal = 0.0; // kg CO2e saved vs. an always-on instance
};

/// Price floored to $0.001; charge-backs scale the report's energies to annual_hours.
GreenSlaQuote sla_quote(double normal_hourly_price, const SavingsReport& report, const EmissionParams& params,
                        double annual_hours = 8760.0);

} // namespace peakpause
