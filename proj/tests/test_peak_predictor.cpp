#include "peakpause/errors.hpp"
#include "peakpause/peak_predictor.hpp"
#include "peakpause/serialization.hpp"

#include "oracles.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <random>

using namespace peakpause;
using testing_support::flat_day;
using testing_support::series_of;

namespace {

HourlyProfile profile_of(const std::array<double, 24>& means)
{
    HourlyProfile p;
    for (int h = 0; h < 24; ++h) {
        p.mean_price_by_hour[h] = means[static_cast<std::size_t>(h)];
        p.sample_count_by_hour[static_cast<std::size_t>(h)] = 1;
    }
    return p;
}

std::array<double, 24> random_means(std::mt19937_64& rng)
{
    return oracle::random_days(rng, 1).front();
}

} // namespace

TEST_CASE("hour count from downtime ratio")
{
    CHECK(hour_count(0.16) == 4);
    CHECK(hour_count(0.0) == 0);
    CHECK(hour_count(1.0) == 24);
    CHECK(hour_count(7.0 / 24.0) == 7);
    CHECK(hour_count(0.3) == 8);
    CHECK_THROWS_AS(hour_count(-0.01), ValidationError);
    CHECK_THROWS_AS(hour_count(1.01), ValidationError);
    CHECK_THROWS_AS(hour_count(std::nan("")), ValidationError);
}

TEST_CASE("find_expensive_hours examples")
{
    std::array<double, 24> means;
    means.fill(0.02);
    means[13] = 0.05;
    means[14] = 0.06;
    means[15] = 0.07;
    means[16] = 0.055;
    means[12] = 0.04;

    const auto policy = find_expensive_hours(profile_of(means), 0.16);
    CHECK(policy.n() == 4);
    CHECK(policy.expensive_hours() == std::vector<int>{13, 14, 15, 16});
    CHECK(policy.expensive_hours() == oracle::best_subset(means, 4));

    CHECK(find_expensive_hours(profile_of(means), 0.0).expensive_hours().empty());
    CHECK(find_expensive_hours(profile_of(means), 1.0).n() == 24);
    CHECK_THROWS_AS(find_expensive_hours(profile_of(means), 1.5), ValidationError);
}

TEST_CASE("equal means: earlier hour wins")
{
    std::array<double, 24> means;
    means.fill(0.02);
    means[20] = 0.05;
    means[9] = 0.05;
    means[3] = 0.05;
    CHECK(find_expensive_hours(profile_of(means), 2.0 / 24.0).expensive_hours() == std::vector<int>{3, 9});
}

TEST_CASE("selection is optimal over all n-subsets and scale invariant (property)")
{
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto means = random_means(rng);
        for (int n = 1; n <= 6; ++n) {
            const double ratio = n / 24.0;
            const auto policy = find_expensive_hours(profile_of(means), ratio);
            CHECK(policy.expensive_hours() == oracle::best_subset(means, n));

            auto scaled = means;
            const double c = scale(rng);
            for (auto& m : scaled)
                m *= c;
            CHECK(find_expensive_hours(profile_of(scaled), ratio).expensive_hours() == policy.expensive_hours());
        }
    }
}

TEST_CASE("is_expensive")
{
    const ExpensiveHourPolicy policy(0.16, {13, 14, 15, 16});
    CHECK(is_expensive(policy, make_datetime(2012, 6, 1, 15, 42)));
    CHECK_FALSE(is_expensive(policy, make_datetime(2012, 6, 1, 3)));
    CHECK_FALSE(is_expensive(ExpensiveHourPolicy{}, make_datetime(2012, 6, 1, 15)));

    std::mt19937_64 rng(9);
    for (int n : {0, 1, 4, 7, 24}) {
        const auto p = find_expensive_hours(profile_of(random_means(rng)), n / 24.0);
        int hits = 0;
        for (int h = 0; h < 24; ++h)
            hits += is_expensive(p, make_datetime(2012, 6, 1, 9) + Hours{h} + Seconds{1799});
        CHECK(hits == n);
    }
}

TEST_CASE("policy validation")
{
    CHECK_THROWS_AS(ExpensiveHourPolicy(0.16, {1, 2, 3}), ValidationError);
    CHECK_THROWS_AS(ExpensiveHourPolicy(0.16, {1, 2, 3, 3}), ValidationError);
    CHECK_THROWS_AS(ExpensiveHourPolicy(0.16, {1, 2, 3, 24}), ValidationError);
    CHECK_THROWS_AS(ExpensiveHourPolicy(0.0, {1}), ValidationError);
}

TEST_CASE("policy JSON round-trip")
{
    const ExpensiveHourPolicy policy(0.16, {16, 13, 14, 15}, "[2012-06-01T00:00, 2012-09-01T00:00)");
    const auto j = to_json(policy);
    CHECK(j.at("n") == 4);
    CHECK(j.at("expensive_hours") == nlohmann::json::array({13, 14, 15, 16}));
    CHECK(policy_from_json(j) == policy);

    auto bad = j;
    bad["n"] = 5;
    CHECK_THROWS_AS(policy_from_json(bad), ValidationError);
    CHECK_THROWS_AS(policy_from_json(nlohmann::json::object()), ValidationError);
}

TEST_CASE("history window is the three calendar months before the day")
{
    const auto w = history_window(*parse_date("2012-09-01"));
    CHECK(w.begin == make_datetime(2012, 6, 1));
    CHECK(w.end == make_datetime(2012, 9, 1));
}

TEST_CASE("train_policy uses only the window")
{
    std::vector<std::array<double, 24>> days(4, flat_day(0.02));
    days[0][5] = 0.09; // outside the window below
    days[2][18] = 0.09;
    days[3][18] = 0.08;
    const auto series = series_of(days);
    const auto policy = train_policy(series, {make_datetime(2012, 6, 2), make_datetime(2012, 6, 5)}, 1.0 / 24.0);
    CHECK(policy.expensive_hours() == std::vector<int>{18});
    CHECK(policy.trained_on().find("2012-06-02T00:00") != std::string::npos);
}

TEST_CASE("oracle comparison")
{
    SUBCASE("zero when predicted hours are each day's top n")
    {
        std::mt19937_64 rng(21);
        auto days = oracle::random_days(rng, 8, 0.01, 0.04);
        for (auto& d : days)
            for (int h : {14, 15, 16, 17})
                d[static_cast<std::size_t>(h)] += 0.1;
        const auto series = series_of(days);
        const auto history = series.slice({series.start(), make_datetime(2012, 6, 4)});
        const auto test = series.slice({make_datetime(2012, 6, 4), series.end()});
        const auto eval = evaluate_vs_oracle(history, test, 0.16);
        CHECK(eval.rmse == 0.0);
        CHECK(eval.relative_error == 0.0);
        CHECK(eval.days == 5);
        CHECK(eval.policy.expensive_hours() == std::vector<int>{14, 15, 16, 17});
    }
    SUBCASE("matches a per-day brute-force oracle on random days")
    {
        std::mt19937_64 rng(99);
        const auto history_days = oracle::random_days(rng, 10);
        const auto test_days = oracle::random_days(rng, 5);
        const auto history = series_of(history_days);
        const auto test = series_of(test_days, make_datetime(2012, 6, 11));

        // Independent route: means by hour, best subset by enumeration, per-day sort.
        std::array<double, 24> means{};
        for (const auto& d : history_days)
            for (int h = 0; h < 24; ++h)
                means[static_cast<std::size_t>(h)] += d[static_cast<std::size_t>(h)] / 10.0;
        const auto predicted = oracle::best_subset(means, 4);
        double sq = 0.0, opt_sum = 0.0;
        for (const auto& d : test_days) {
            double pred = 0.0;
            for (int h : predicted)
                pred += d[static_cast<std::size_t>(h)];
            const double opt = oracle::top_n_sum(d, 4);
            CHECK(opt >= pred);
            sq += (opt - pred) * (opt - pred);
            opt_sum += opt;
        }
        const double rmse = std::sqrt(sq / 5.0);

        const auto eval = evaluate_vs_oracle(history, test, 0.16);
        CHECK(eval.rmse > 0.0);
        CHECK(eval.rmse == doctest::Approx(rmse).epsilon(1e-12));
        CHECK(eval.relative_error == doctest::Approx(rmse / (opt_sum / 5.0)).epsilon(1e-12));
        for (std::size_t i = 0; i < eval.days; ++i)
            CHECK(eval.optimal_sums[i] - eval.predicted_sums[i] >= 0.0);
    }
    SUBCASE("incomplete test day is rejected")
    {
        const auto history = series_of({flat_day(0.02)});
        const auto test = series_of({flat_day(0.02)}, make_datetime(2012, 6, 2, 1));
        CHECK_THROWS_AS(evaluate_vs_oracle(history, test, 0.16), ValidationError);
    }
    SUBCASE("daily retraining follows the shifting peak")
    {
        // Peak at hour 3 for a long history, then moves to hour 20.
        std::vector<std::array<double, 24>> days(100, flat_day(0.02));
        for (std::size_t d = 0; d < days.size(); ++d)
            days[d][d < 60 ? 3 : 20] = 0.09;
        const auto series = series_of(days);
        const auto split = make_datetime(2012, 6, 1) + Hours{24 * 50};
        const auto history = series.slice({series.start(), split});
        const auto test = series.slice({split, series.end()});

        const auto fixed = evaluate_vs_oracle(history, test, 1.0 / 24.0);
        OracleOptions opts;
        opts.retrain_daily = true;
        opts.window_months = 1;
        const auto daily = evaluate_vs_oracle(history, test, 1.0 / 24.0, opts);
        CHECK(daily.rmse < fixed.rmse);
        CHECK(daily.policy.expensive_hours() == std::vector<int>{20});
    }
}
