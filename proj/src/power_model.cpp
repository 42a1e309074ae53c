#include "peakpause/power_model.hpp"

#include "peakpause/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

namespace peakpause {

void ServerPowerModel::validate() const
{
    if (!(peak_power > 0.0) || !std::isfinite(peak_power))
        throw ValidationError("peak power must be positive, got " + format_double(peak_power));
    if (!(idle_ratio >= 0.0 && idle_ratio <= 1.0))
        throw ValidationError("idle ratio must be in [0,1], got " + format_double(idle_ratio));
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
        throw ValidationError("noise sigma must be non-negative, got " + format_double(noise_sigma));
}

PowerTrace::PowerTrace(DateTime start, Seconds sample_interval, Eigen::VectorXd samples, std::string label)
    : start_(start), interval_(sample_interval), samples_(std::move(samples)), label_(std::move(label))
{
    if (interval_ <= Seconds{0})
        throw ValidationError("sample interval must be positive");
    if (!samples_.allFinite())
        throw ValidationError("power trace contains non-finite samples");
    if (samples_.size() > 0 && samples_.minCoeff() < 0.0)
        throw ValidationError("power trace contains negative samples");
}

PowerTrace synthesize_trace(const ServerPowerModel& model, const ScheduleMask& mask)
{
    model.validate();
    std::mt19937_64 engine(model.seed);
    std::normal_distribution<double> standard(0.0, 1.0);
    Eigen::VectorXd samples(mask.size());
    for (Eigen::Index i = 0; i < mask.size(); ++i) {
        const double z = standard(engine);
        const double mean = mask.flags[i] ? model.idle_power() : model.peak_power;
        samples[i] = std::max(0.0, mean + model.noise_sigma * z);
    }
    std::ostringstream label;
    label << "synthetic peak=" << format_double(model.peak_power) << "W idle_ratio="
          << format_double(model.idle_ratio) << " sigma=" << format_double(model.noise_sigma)
          << "W seed=" << model.seed;
    return PowerTrace(mask.start, mask.sample_interval, std::move(samples), label.str());
}

PowerTrace ewma_smooth(const PowerTrace& trace, double alpha)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw ValidationError("EWMA alpha must be in (0,1], got " + format_double(alpha));
    if (trace.size() == 0)
        throw ValidationError("cannot smooth an empty trace");
    Eigen::VectorXd smoothed = ewma(trace.samples(), alpha);
    return PowerTrace(trace.start(), trace.sample_interval(), std::move(smoothed),
                      trace.label() + " (ewma alpha=" + format_double(alpha) + ")");
}

std::string save_trace_csv(const PowerTrace& trace)
{
    std::string out = "timestamp,power_w\n";
    for (Eigen::Index i = 0; i < trace.size(); ++i) {
        out += format_iso_seconds(trace.time_at(i));
        out += ',';
        out += format_double(trace.samples()[i]);
        out += '\n';
    }
    return out;
}

PowerTrace load_trace_csv(std::string_view text, Seconds single_row_interval)
{
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    std::vector<DateTime> stamps;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        if (!header_seen) {
            if (line != "timestamp,power_w")
                throw ParseError(lineno, "expected header 'timestamp,power_w'");
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw ParseError(lineno, "expected 2 columns");
        const auto ts = parse_datetime(std::string_view(line).substr(0, comma));
        if (!ts)
            throw ParseError(lineno, "malformed timestamp '" + line.substr(0, comma) + "'");
        const auto watts = parse_double(std::string_view(line).substr(comma + 1));
        if (!watts || !std::isfinite(*watts) || *watts < 0.0)
            throw ParseError(lineno, "power must be a finite non-negative number, got '"
                                         + line.substr(comma + 1) + "'");
        if (stamps.size() >= 2 && *ts - stamps.back() != stamps[1] - stamps[0])
            throw ParseError(lineno, "non-uniform sampling: gap of "
                                         + std::to_string((*ts - stamps.back()).count()) + " s, expected "
                                         + std::to_string((stamps[1] - stamps[0]).count()) + " s");
        if (stamps.size() == 1 && *ts <= stamps.back())
            throw ParseError(lineno, "timestamps must be strictly increasing");
        stamps.push_back(*ts);
        values.push_back(*watts);
    }
    if (!header_seen || stamps.empty())
        throw ValidationError("power trace file has no samples");
    const auto interval = stamps.size() >= 2 ? stamps[1] - stamps[0] : single_row_interval;
    Eigen::VectorXd samples = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    return PowerTrace(stamps.front(), interval, std::move(samples), "csv");
}

} // namespace peakpause
