#include "peakpause/accounting.hpp"
#include "peakpause/errors.hpp"
#include "peakpause/scheduler.hpp"
#include "peakpause/serialization.hpp"

#include "oracles.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace peakpause;
using testing_support::flat_day;
using testing_support::series_of;

namespace {

const auto kStart = make_datetime(2012, 6, 1);

PowerTrace constant_trace(double watts, Seconds duration, Seconds interval = Seconds{5})
{
    return PowerTrace(kStart, interval, Eigen::VectorXd::Constant(duration / interval, watts));
}

PriceSeries hourly_prices(std::initializer_list<double> prices)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(prices.size()));
    Eigen::Index i = 0;
    for (double p : prices)
        v[i++] = p;
    return PriceSeries(kStart, v);
}

PriceSeries bundled_prices()
{
    std::ifstream in(std::string(PEAKPAUSE_DATA_DIR) + "/sample_prices.csv");
    std::ostringstream s;
    s << in.rdbuf();
    return parse_price_csv(s.str(), CsvLayout::long_form);
}

} // namespace

TEST_CASE("integrate_cost examples")
{
    SUBCASE("unit sanity: 1000 W for 1 h at $1/kWh")
    {
        const auto r = integrate_cost(constant_trace(1000.0, Hours{1}), hourly_prices({1.0}));
        CHECK(r.energy == 1.0);
        CHECK(r.cost == 1.0);
        CHECK(r.samples_used == 720);
        CHECK(r.interval.end == kStart + Hours{1});
    }
    SUBCASE("constant 100 W for 1 h at 0.03")
    {
        const auto r = integrate_cost(constant_trace(100.0, Hours{1}), hourly_prices({0.03}));
        CHECK(r.energy == doctest::Approx(0.1).epsilon(1e-14));
        CHECK(r.cost == doctest::Approx(0.003).epsilon(1e-14));
    }
    SUBCASE("two hours at 0.02 then 0.04")
    {
        const auto prices = hourly_prices({0.02, 0.04});
        CHECK(integrate_cost(constant_trace(100.0, Hours{2}, Hours{1}), prices).cost == 0.006);
        CHECK(integrate_cost(constant_trace(100.0, Hours{2}), prices).cost == doctest::Approx(0.006).epsilon(1e-14));
    }
    SUBCASE("alternating 0/200 W is half of constant 200 W")
    {
        Eigen::VectorXd alt(720);
        for (Eigen::Index i = 0; i < alt.size(); ++i)
            alt[i] = i % 2 ? 200.0 : 0.0;
        const auto prices = hourly_prices({0.05});
        const auto half = integrate_cost(PowerTrace(kStart, Seconds{5}, alt), prices);
        const auto full = integrate_cost(constant_trace(200.0, Hours{1}), prices);
        CHECK(half.energy == doctest::Approx(full.energy / 2));
        CHECK(half.cost == doctest::Approx(full.cost / 2));
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(integrate_cost(constant_trace(100.0, Hours{3}), hourly_prices({0.02, 0.04})),
                        ValidationError);
        CHECK_THROWS_AS(integrate_cost(PowerTrace(kStart, Seconds{5}, Eigen::VectorXd(0)), hourly_prices({0.02})),
                        ValidationError);
    }
}

TEST_CASE("rectangle rule matches a per-sample loop on random traces (property)")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> watts(0.0, 300.0);
    std::uniform_int_distribution<int> interval_s(1, 900);
    for (int trial = 0; trial < 20; ++trial) {
        const auto days = oracle::random_days(rng, 2, -0.01, 0.2);
        const auto prices = series_of(days);
        const Seconds interval{interval_s(rng)};
        const auto n = (Hours{24} + Seconds{interval_s(rng)}) / interval;
        Eigen::VectorXd samples(n);
        for (auto& s : samples)
            s = watts(rng);
        const PowerTrace trace(kStart + Seconds{trial * 37}, interval, samples);

        double energy = 0.0, cost = 0.0;
        const double dt_h = static_cast<double>(interval.count()) / 3600.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto since = trace.time_at(i) - kStart;
            const auto hour = static_cast<std::size_t>(since / Hours{1});
            const double c = days[hour / 24][hour % 24];
            energy += dt_h * samples[i] / 1000.0;
            cost += dt_h * samples[i] * c / 1000.0;
        }
        const auto r = integrate_cost(trace, prices);
        CHECK(r.energy == doctest::Approx(energy).epsilon(1e-12));
        CHECK(r.cost == doctest::Approx(cost).epsilon(1e-12));
    }
}

TEST_CASE("left-rectangle error against analytic integrals")
{
    const auto prices = hourly_prices({1.0, 1.0, 1.0});
    // Constant power: exact.
    CHECK(integrate_cost(constant_trace(250.0, Hours{2}, Seconds{60}), prices).energy == 0.5);

    // Linear ramp P(t) = slope * t over T seconds: error bounded by dt * |slope| * T / 2.
    for (int dt : {1, 5, 60, 300}) {
        const double slope = 0.05; // W/s
        const double T = 7200.0;
        const auto n = static_cast<Eigen::Index>(T / dt);
        Eigen::VectorXd ramp(n);
        for (Eigen::Index i = 0; i < n; ++i)
            ramp[i] = slope * static_cast<double>(i * dt);
        const auto r = integrate_cost(PowerTrace(kStart, Seconds{dt}, ramp), prices);
        const double exact_kwh = slope * T * T / 2.0 / 3.6e6;
        const double bound_kwh = dt * slope * T / 2.0 / 3.6e6;
        CHECK(std::abs(r.energy - exact_kwh) <= bound_kwh * (1 + 1e-9));
    }
}

TEST_CASE("compare: closed form on flat prices")
{
    const auto prices = series_of(std::vector<std::array<double, 24>>(3, flat_day(0.04)));
    const Interval interval{kStart, kStart + Hours{72}};
    for (int n : {0, 1, 4, 6}) {
        std::vector<int> hours;
        for (int h = 0; h < n; ++h)
            hours.push_back(10 + h);
        const ExpensiveHourPolicy policy(n / 24.0, hours);
        for (double idle : {0.0, 0.3, 0.6, 1.0}) {
            const auto r = compare({180.0, idle, 0.0, 1}, policy, prices, interval);
            const double expected = n / 24.0 * (1.0 - idle);
            CHECK(r.energy_savings == doctest::Approx(expected).epsilon(1e-9));
            CHECK(r.cost_savings == doctest::Approx(expected).epsilon(1e-9));
            CHECK(r.availability == doctest::Approx(1.0 - n / 24.0));
            CHECK(r.cpu_time_lost == doctest::Approx(n / 24.0));
        }
    }
    const auto empty = compare({180.0, 0.2, 2.0, 1}, ExpensiveHourPolicy{}, prices, interval);
    CHECK(empty.energy_savings == 0.0);
    CHECK(empty.cost_savings == 0.0);
    CHECK(empty.availability == 1.0);
}

TEST_CASE("compare: idle ratio 1 saves nothing even with noise")
{
    const auto prices = bundled_prices();
    const ExpensiveHourPolicy policy(0.16, {14, 15, 16, 17});
    const auto r = compare({200.0, 1.0, 2.0, 9}, policy, prices, {kStart, kStart + Hours{48}});
    CHECK(r.energy_savings == 0.0);
    CHECK(r.cost_savings == 0.0);
}

TEST_CASE("compare_traces: measured baseline and scheduled traces")
{
    const auto prices = hourly_prices({0.02, 0.08});
    const ExpensiveHourPolicy policy(1.0 / 24.0, {1});
    const auto baseline = constant_trace(44.0, Hours{2}, Seconds{60});
    Eigen::VectorXd s = baseline.samples();
    s.tail(60).setConstant(34.0);
    const auto r = compare_traces(baseline, PowerTrace(kStart, Seconds{60}, s), policy, prices);
    CHECK(r.energy_savings == doctest::Approx(10.0 / 88.0));
    CHECK(r.cost_savings == doctest::Approx(10.0 * 0.08 / (44.0 * 0.02 + 44.0 * 0.08)));
    CHECK(r.availability == doctest::Approx(0.5));
    CHECK_THROWS_AS(compare_traces(baseline, constant_trace(1.0, Hours{1}, Seconds{60}), policy, prices),
                    ValidationError);
}

TEST_CASE("savings table structure on the bundled dataset")
{
    const auto prices = bundled_prices();
    const auto policy = train_policy(prices, history_window(*parse_date("2012-09-01")), 0.16);
    const Interval september{make_datetime(2012, 9, 1), make_datetime(2012, 10, 1)};
    SweepOptions options;
    options.noise_sigma = 0.0;
    const auto table = savings_table({100.0, 200.0}, {0.0, 0.3, 0.6}, policy, prices, september, options);
    REQUIRE(table.cells.size() == 3);
    for (std::size_t r = 0; r < 3; ++r) {
        CHECK(table.cells[r][0].energy_savings == doctest::Approx(table.cells[r][1].energy_savings).epsilon(1e-12));
        CHECK(table.cells[r][0].cost_savings == doctest::Approx(table.cells[r][1].cost_savings).epsilon(1e-12));
        CHECK(table.cells[r][0].cost_savings >= table.cells[r][0].energy_savings);
        if (r > 0) {
            CHECK(table.cells[r][0].energy_savings < table.cells[r - 1][0].energy_savings);
            CHECK(table.cells[r][0].cost_savings < table.cells[r - 1][0].cost_savings);
        }
    }
    const double ratio = table.cells[0][0].cost_savings / table.cells[0][0].energy_savings;
    for (std::size_t r = 1; r < 3; ++r)
        CHECK(table.cells[r][1].cost_savings / table.cells[r][1].energy_savings == doctest::Approx(ratio).epsilon(1e-9));

    const auto csv = savings_table_csv(table);
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "idle_ratio,energy_savings_100W,energy_savings_200W,cost_savings_100W,cost_savings_200W");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    const auto j = to_json(table);
    CHECK(j.at("cells").size() == 6);
}

TEST_CASE("parallel and sequential sweeps agree")
{
    const auto prices = bundled_prices();
    const ExpensiveHourPolicy policy(0.16, {14, 15, 16, 17});
    SweepOptions options;
    const Interval two_days{kStart, kStart + Hours{48}};
    const auto par = savings_table({100.0, 200.0}, {0.0, 0.5}, policy, prices, two_days, options);
    options.parallel = false;
    const auto seq = savings_table({100.0, 200.0}, {0.0, 0.5}, policy, prices, two_days, options);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c)
            CHECK(par.cells[r][c].cost_savings == seq.cells[r][c].cost_savings);
}

TEST_CASE("environmental charge-back")
{
    const EmissionParams params{cef_from_lb_per_mwh(1537.82), 1.3};
    CHECK(params.cef == doctest::Approx(0.697544).epsilon(1e-5));
    CHECK(environmental_chargeback(0.0, params) == 0.0);
    CHECK(environmental_chargeback(2.0, params) == doctest::Approx(2.0 * environmental_chargeback(1.0, params)));
    CHECK_THROWS_AS(environmental_chargeback(-1.0, params), ValidationError);
    CHECK_THROWS_AS(environmental_chargeback(1.0, {0.5, 0.9}), ValidationError);
    CHECK_THROWS_AS(environmental_chargeback(1.0, {0.0, 1.3}), ValidationError);
}

TEST_CASE("green SLA quote")
{
    const auto prices = series_of(std::vector<std::array<double, 24>>(1, flat_day(0.04)));
    const ExpensiveHourPolicy policy(0.16, {14, 15, 16, 17});
    auto report = compare({200.0, 0.0, 0.0, 1}, policy, prices, {kStart, kStart + Hours{24}});
    const EmissionParams params{cef_from_lb_per_mwh(1537.82), 1.3};

    report.cost_savings = 0.266;
    auto q = sla_quote(0.060, report, params);
    CHECK(q.hourly_price == 0.044);
    CHECK(q.availability == doctest::Approx(0.8333).epsilon(1e-4));
    // 200 W * 20 h/day * 365 days = 1460 kWh.
    CHECK(q.annual_chargeback == doctest::Approx(1460.0 * params.cef * 1.3));
    CHECK(q.chargeback_delta_vs_normal == doctest::Approx(292.0 * params.cef * 1.3));

    report.cost_savings = 0.0;
    CHECK(sla_quote(0.060, report, params).hourly_price == 0.060);

    const auto doubled = sla_quote(0.060, report, params, 2 * 8760.0);
    CHECK(doubled.annual_chargeback == doctest::Approx(2 * q.annual_chargeback));

    const auto round_trip = savings_report_from_json(to_json(report));
    CHECK(round_trip.baseline.energy == report.baseline.energy);
    CHECK(round_trip.baseline.interval.end == report.baseline.interval.end);
    CHECK(round_trip.availability == report.availability);
}
