#include "peakpause/accounting.hpp"

#include "peakpause/errors.hpp"
#include "peakpause/scheduler.hpp"

#include <cmath>
#include <future>
#include <sstream>

namespace peakpause {

namespace {

double fraction_saved(double baseline, double scheduled)
{
    return baseline == 0.0 ? 0.0 : 1.0 - scheduled / baseline;
}

} // namespace

EnergyCostResult integrate_cost(const PowerTrace& trace, const PriceSeries& prices)
{
    if (trace.size() == 0)
        throw ValidationError("cannot integrate an empty trace");
    // Hours touched are those containing t_0 .. t_{N-1}.
    const auto first = trace.start();
    const auto last = trace.time_at(trace.size() - 1);
    if (!prices.covers(first) || !prices.covers(last))
        throw ValidationError("prices [" + format_hour_stamp(prices.start()) + ", "
                              + format_hour_stamp(prices.end()) + ") do not cover trace ["
                              + format_iso_seconds(first) + ", " + format_iso_seconds(trace.end()) + ")");

    Eigen::VectorXd price(trace.size());
    for (Eigen::Index i = 0; i < trace.size(); ++i)
        price[i] = prices.price_at(trace.time_at(i));

    const double step = static_cast<double>((trace.end() - trace.start()).count())
                        / static_cast<double>(trace.size());
    const auto [energy, cost] = rectangle_energy_cost(trace.samples(), price, step);
    return {energy, cost, {trace.start(), trace.end()}, trace.size()};
}

SavingsReport compare_traces(const PowerTrace& baseline, const PowerTrace& scheduled,
                             const ExpensiveHourPolicy& policy, const PriceSeries& prices)
{
    if (baseline.start() != scheduled.start() || baseline.end() != scheduled.end())
        throw ValidationError("baseline and scheduled traces cover different intervals");
    SavingsReport r;
    r.baseline = integrate_cost(baseline, prices);
    r.scheduled = integrate_cost(scheduled, prices);
    r.energy_savings = fraction_saved(r.baseline.energy, r.scheduled.energy);
    r.cost_savings = fraction_saved(r.baseline.cost, r.scheduled.cost);
    const auto mask = mask_from_policy(policy, scheduled.start(), scheduled.end() - scheduled.start(),
                                       scheduled.sample_interval());
    r.availability = 1.0 - static_cast<double>(mask.flags.count()) / static_cast<double>(mask.size());
    r.cpu_time_lost = policy.n() / 24.0;
    return r;
}

SavingsReport compare(const ServerPowerModel& model, const ExpensiveHourPolicy& policy,
                      const PriceSeries& prices, Interval interval, Seconds sample_interval)
{
    model.validate();
    const auto length = interval.length();
    auto scheduled_mask = mask_from_policy(policy, interval.begin, length, sample_interval);
    auto baseline_mask = scheduled_mask;
    baseline_mask.flags.setConstant(false);

    auto r = compare_traces(synthesize_trace(model, baseline_mask), synthesize_trace(model, scheduled_mask),
                            policy, prices);
    r.peak_power = model.peak_power;
    r.idle_ratio = model.idle_ratio;
    return r;
}

SavingsTable savings_table(const std::vector<double>& peak_powers, const std::vector<double>& idle_ratios,
                           const ExpensiveHourPolicy& policy, const PriceSeries& prices, Interval interval,
                           const SweepOptions& options)
{
    if (peak_powers.empty() || idle_ratios.empty())
        throw ValidationError("savings table needs at least one peak power and one idle ratio");
    SavingsTable table{peak_powers, idle_ratios, {}};
    const auto cols = peak_powers.size();

    auto cell = [&](std::size_t r, std::size_t c) {
        ServerPowerModel model{peak_powers[c], idle_ratios[r], options.noise_sigma,
                               options.per_cell_seeds ? options.seed + r * cols + c : options.seed};
        const auto report = compare(model, policy, prices, interval, options.sample_interval);
        return SavingsCell{model.peak_power, model.idle_ratio, report.energy_savings, report.cost_savings};
    };

    table.cells.assign(idle_ratios.size(), std::vector<SavingsCell>(cols));
    if (options.parallel) {
        std::vector<std::vector<std::future<SavingsCell>>> pending(idle_ratios.size());
        for (std::size_t r = 0; r < idle_ratios.size(); ++r)
            for (std::size_t c = 0; c < cols; ++c)
                pending[r].push_back(std::async(std::launch::async, cell, r, c));
        for (std::size_t r = 0; r < idle_ratios.size(); ++r)
            for (std::size_t c = 0; c < cols; ++c)
                table.cells[r][c] = pending[r][c].get();
    } else {
        for (std::size_t r = 0; r < idle_ratios.size(); ++r)
            for (std::size_t c = 0; c < cols; ++c)
                table.cells[r][c] = cell(r, c);
    }
    return table;
}

std::string savings_table_csv(const SavingsTable& table)
{
    std::ostringstream out;
    out << "idle_ratio";
    for (double p : table.peak_powers)
        out << ",energy_savings_" << format_double(p) << "W";
    for (double p : table.peak_powers)
        out << ",cost_savings_" << format_double(p) << "W";
    out << '\n';
    char buf[32];
    for (std::size_t r = 0; r < table.idle_ratios.size(); ++r) {
        out << format_double(table.idle_ratios[r]);
        for (const auto& c : table.cells[r]) {
            std::snprintf(buf, sizeof buf, ",%.2f", 100.0 * c.energy_savings);
            out << buf;
        }
        for (const auto& c : table.cells[r]) {
            std::snprintf(buf, sizeof buf, ",%.2f", 100.0 * c.cost_savings);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

void EmissionParams::validate() const
{
    if (!(cef > 0.0) || !std::isfinite(cef))
        throw ValidationError("CEF must be positive, got " + format_double(cef));
    if (!(pue >= 1.0) || !std::isfinite(pue))
        throw ValidationError("PUE must be at least 1, got " + format_double(pue));
}

double environmental_chargeback(double energy_kwh, const EmissionParams& params)
{
    params.validate();
    if (!(energy_kwh >= 0.0))
        throw ValidationError("energy must be non-negative, got " + format_double(energy_kwh));
    return params.cef * params.pue * energy_kwh;
}

GreenSlaQuote sla_quote(double normal_hourly_price, const SavingsReport& report, const EmissionParams& params,
                        double annual_hours)
{
    if (!(normal_hourly_price >= 0.0))
        throw ValidationError("normal hourly price must be non-negative");
    if (!(annual_hours > 0.0))
        throw ValidationError("annual hours must be positive");
    GreenSlaQuote q;
    q.availability = report.availability;
    // Small slack so 0.060 * (1 - 0.266) = 0.04404 does not floor to 0.043 via rounding noise.
    const double discounted = normal_hourly_price * (1.0 - report.cost_savings);
    q.hourly_price = std::max(0.0, std::floor(discounted * 1000.0 + 1e-9) / 1000.0);

    const double report_hours = std::chrono::duration<double, std::ratio<3600>>(report.baseline.interval.length()).count();
    if (report_hours > 0.0) {
        const double scale = annual_hours / report_hours;
        const double green = environmental_chargeback(report.scheduled.energy * scale, params);
        const double normal = environmental_chargeback(report.baseline.energy * scale, params);
        q.annual_chargeback = green;
        q.chargeback_delta_vs_normal = normal - green;
    }
    return q;
}

} // namespace peakpause
