#pragma once

// Experiment parameters loadable from a JSON file, as an alternative to
// passing every CLI flag. Absent keys keep their defaults.

#include "peakpause/calendar.hpp"
#include "peakpause/price_data.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace peakpause {

struct ExperimentConfig {
    std::string prices;          // price CSV path
    CsvLayout format = CsvLayout::long_form;
    GapPolicy gap_policy = GapPolicy::reject;
    std::optional<Interval> window;      // training history
    std::optional<Date> target_day;      // history = 3 months before this day
    std::optional<Interval> test_window; // held-out oracle evaluation
    double downtime_ratio = 0.16;
    std::string policy;                  // policy JSON path
    std::vector<double> peak_powers{100.0, 200.0};
    std::vector<double> idle_ratios{0.0, 0.3, 0.6};
    double noise_sigma = 2.0;
    std::uint64_t seed = 1;
    Seconds sample_interval{5};
    std::optional<DateTime> start;
    Hours duration{24};
    std::vector<std::string> instances{"vm-0"};
    double cef_lb_per_mwh = 1537.82;
    double pue = 1.3;
    double normal_hourly_price = 0.060;
    double annual_hours = 8760.0;
    double ewma_alpha = 0.05;
    std::string output_dir = ".";

    /// Throws ValidationError if a parameter is out of its domain or a
    /// referenced input file is missing.
    void validate() const;
};

/// Unknown keys are rejected so that typos do not pass silently.
ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig load_experiment_config(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

CsvLayout parse_layout(std::string_view name);
GapPolicy parse_gap_policy(std::string_view name);

} // namespace peakpause
