#include "peakpause/errors.hpp"
#include "peakpause/experiment_config.hpp"

#include <doctest.h>

using namespace peakpause;

TEST_CASE("experiment config parsing")
{
    const auto c = parse_experiment_config(R"({
        "format": "wide", "gap_policy": "impute", "window": "2012-06-01/2012-09-01",
        "downtime_ratio": 0.25, "peak_powers": [150], "idle_ratios": [0.1, 0.2],
        "sample_interval_s": 10, "start": "2012-09-03T00:00", "duration_h": 48,
        "cef_lb_per_mwh": 1000, "pue": 1.5, "seed": 12
    })");
    CHECK(c.format == CsvLayout::wide);
    CHECK(c.gap_policy == GapPolicy::impute_hour_mean);
    REQUIRE(c.window);
    CHECK(c.window->begin == make_datetime(2012, 6, 1));
    CHECK(c.downtime_ratio == 0.25);
    CHECK(c.peak_powers == std::vector<double>{150.0});
    CHECK(c.sample_interval == Seconds{10});
    CHECK(c.start == make_datetime(2012, 9, 3));
    CHECK(c.duration == Hours{48});
    CHECK(c.seed == 12);
    CHECK(c.noise_sigma == 2.0);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("experiment config errors")
{
    CHECK_THROWS_WITH_AS(parse_experiment_config(R"({"downtime": 0.2})"), doctest::Contains("downtime"),
                         ValidationError);
    CHECK_THROWS_AS(parse_experiment_config("{"), ValidationError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"window": "2012-06-01"})"), ValidationError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"format": "tall"})"), ValidationError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"pue": "high"})"), ValidationError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"downtime_ratio": 2})").validate(), ValidationError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"pue": 0.9})").validate(), ValidationError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"prices": "/no/such/file.csv"})").validate(), ValidationError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"idle_ratios": [1.5]})").validate(), ValidationError);
}
