#include "peakpause/experiment_config.hpp"

#include "peakpause/errors.hpp"
#include "peakpause/peak_predictor.hpp"
#include "peakpause/serialization.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace peakpause {

using nlohmann::json;

CsvLayout parse_layout(std::string_view name)
{
    if (name == "long")
        return CsvLayout::long_form;
    if (name == "wide")
        return CsvLayout::wide;
    throw ValidationError("unknown price layout '" + std::string(name) + "' (expected long or wide)");
}

GapPolicy parse_gap_policy(std::string_view name)
{
    if (name == "reject")
        return GapPolicy::reject;
    if (name == "impute" || name == "impute_hour_mean")
        return GapPolicy::impute_hour_mean;
    throw ValidationError("unknown gap policy '" + std::string(name) + "' (expected reject or impute)");
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, std::string_view contents)
{
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty())
        std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
        throw IoError("error writing " + path);
}

void ExperimentConfig::validate() const
{
    if (!prices.empty() && !std::filesystem::exists(prices))
        throw ValidationError("price file " + prices + " does not exist");
    if (!policy.empty() && !std::filesystem::exists(policy))
        throw ValidationError("policy file " + policy + " does not exist");
    hour_count(downtime_ratio);
    for (double p : peak_powers)
        if (!(p > 0.0))
            throw ValidationError("peak power must be positive, got " + format_double(p));
    for (double r : idle_ratios)
        if (!(r >= 0.0 && r <= 1.0))
            throw ValidationError("idle ratio must be in [0,1], got " + format_double(r));
    if (!(noise_sigma >= 0.0))
        throw ValidationError("noise sigma must be non-negative");
    if (sample_interval <= Seconds{0})
        throw ValidationError("sample interval must be positive");
    if (duration <= Hours{0})
        throw ValidationError("duration must be positive");
    if (instances.empty())
        throw ValidationError("at least one instance id is required");
    if (!(cef_lb_per_mwh > 0.0))
        throw ValidationError("CEF must be positive");
    if (!(pue >= 1.0))
        throw ValidationError("PUE must be at least 1");
    if (!(normal_hourly_price >= 0.0))
        throw ValidationError("normal hourly price must be non-negative");
    if (!(annual_hours > 0.0))
        throw ValidationError("annual hours must be positive");
    if (!(ewma_alpha > 0.0 && ewma_alpha <= 1.0))
        throw ValidationError("EWMA alpha must be in (0,1]");
}

ExperimentConfig parse_experiment_config(std::string_view json_text)
{
    const auto j = parse_json(json_text, "experiment config");
    if (!j.is_object())
        throw ValidationError("experiment config must be a JSON object");
    static const std::set<std::string> known{
        "prices", "format", "gap_policy", "window", "target_day", "test_window", "downtime_ratio", "policy",
        "peak_powers", "idle_ratios", "noise_sigma", "seed", "sample_interval_s", "start", "duration_h",
        "instances", "cef_lb_per_mwh", "pue", "normal_hourly_price", "annual_hours", "ewma_alpha", "output_dir"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key))
            throw ValidationError("unknown experiment config key '" + key + "'");

    auto interval = [&](const char* key) {
        const auto text = j.at(key).get<std::string>();
        const auto iv = parse_interval(text);
        if (!iv)
            throw ValidationError(std::string("malformed interval in '") + key + "': " + text);
        return *iv;
    };

    ExperimentConfig c;
    try {
        if (j.contains("prices")) c.prices = j["prices"].get<std::string>();
        if (j.contains("format")) c.format = parse_layout(j["format"].get<std::string>());
        if (j.contains("gap_policy")) c.gap_policy = parse_gap_policy(j["gap_policy"].get<std::string>());
        if (j.contains("window")) c.window = interval("window");
        if (j.contains("test_window")) c.test_window = interval("test_window");
        if (j.contains("target_day")) {
            const auto text = j["target_day"].get<std::string>();
            c.target_day = parse_date(text);
            if (!c.target_day)
                throw ValidationError("malformed target_day " + text);
        }
        if (j.contains("downtime_ratio")) c.downtime_ratio = j["downtime_ratio"].get<double>();
        if (j.contains("policy")) c.policy = j["policy"].get<std::string>();
        if (j.contains("peak_powers")) c.peak_powers = j["peak_powers"].get<std::vector<double>>();
        if (j.contains("idle_ratios")) c.idle_ratios = j["idle_ratios"].get<std::vector<double>>();
        if (j.contains("noise_sigma")) c.noise_sigma = j["noise_sigma"].get<double>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("sample_interval_s")) c.sample_interval = Seconds{j["sample_interval_s"].get<long>()};
        if (j.contains("start")) {
            const auto text = j["start"].get<std::string>();
            c.start = parse_datetime(text);
            if (!c.start)
                throw ValidationError("malformed start " + text);
        }
        if (j.contains("duration_h")) c.duration = Hours{j["duration_h"].get<long>()};
        if (j.contains("instances")) c.instances = j["instances"].get<std::vector<std::string>>();
        if (j.contains("cef_lb_per_mwh")) c.cef_lb_per_mwh = j["cef_lb_per_mwh"].get<double>();
        if (j.contains("pue")) c.pue = j["pue"].get<double>();
        if (j.contains("normal_hourly_price")) c.normal_hourly_price = j["normal_hourly_price"].get<double>();
        if (j.contains("annual_hours")) c.annual_hours = j["annual_hours"].get<double>();
        if (j.contains("ewma_alpha")) c.ewma_alpha = j["ewma_alpha"].get<double>();
        if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid experiment config: ") + e.what());
    }
    return c;
}

ExperimentConfig load_experiment_config(const std::string& path)
{
    auto config = parse_experiment_config(read_file(path));
    // Relative file references resolve against the config file's directory.
    const auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&](std::string& p) {
        if (!p.empty() && std::filesystem::path(p).is_relative())
            p = (base / p).string();
    };
    resolve(config.prices);
    resolve(config.policy);
    return config;
}

} // namespace peakpause
