#pragma once

// Server power traces: synthetic generation from a two-level (peak/idle)
// Gaussian model, EWMA smoothing for plots, and the trace CSV format.

#include "peakpause/calendar.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>

namespace peakpause {

struct ServerPowerModel {
    double peak_power = 200.0; // W
    double idle_ratio = 0.0;   // idle power / peak power
    double noise_sigma = 2.0;  // W
    std::uint64_t seed = 1;

    double idle_power() const noexcept { return idle_ratio * peak_power; }
    /// Throws ValidationError on out-of-domain parameters.
    void validate() const;
};

/// true = paused at that sample.
struct ScheduleMask {
    DateTime start;
    Seconds sample_interval{5};
    Eigen::Array<bool, Eigen::Dynamic, 1> flags;

    Eigen::Index size() const noexcept { return flags.size(); }
    DateTime time_at(Eigen::Index i) const noexcept { return start + sample_interval * i; }
};

class PowerTrace {
public:
    PowerTrace(DateTime start, Seconds sample_interval, Eigen::VectorXd samples, std::string label = {});

    DateTime start() const noexcept { return start_; }
    Seconds sample_interval() const noexcept { return interval_; }
    /// t_N: one interval past the last sample.
    DateTime end() const noexcept { return start_ + interval_ * samples_.size(); }
    Eigen::Index size() const noexcept { return samples_.size(); }
    DateTime time_at(Eigen::Index i) const noexcept { return start_ + interval_ * i; }
    const Eigen::VectorXd& samples() const noexcept { return samples_; }
    const std::string& label() const noexcept { return label_; }

    friend bool operator==(const PowerTrace& a, const PowerTrace& b)
    {
        return a.start_ == b.start_ && a.interval_ == b.interval_ && a.samples_.size() == b.samples_.size()
               && a.samples_ == b.samples_;
    }

private:
    DateTime start_;
    Seconds interval_;
    Eigen::VectorXd samples_;
    std::string label_;
};

/// Sample i ~ N(paused ? idle : peak, sigma), clamped at 0 W. One standard
/// normal draw is consumed per sample regardless of the mask, so traces from
/// the same seed share their noise wherever their masks agree.
PowerTrace synthesize_trace(const ServerPowerModel& model, const ScheduleMask& mask);

/// out[0] = in[0]; out[i] = alpha*in[i] + (1-alpha)*out[i-1].
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
ewma(const Eigen::MatrixBase<Derived>& input, typename Derived::Scalar alpha)
{
    using Scalar = typename Derived::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(input.size());
    if (input.size() == 0)
        return out;
    out[0] = input[0];
    for (Eigen::Index i = 1; i < input.size(); ++i)
        out[i] = alpha * input[i] + (Scalar(1) - alpha) * out[i - 1];
    return out;
}

/// Throws for alpha outside (0,1] or an empty trace.
PowerTrace ewma_smooth(const PowerTrace& trace, double alpha);

/// `timestamp,power_w` rows with ISO-8601 second-resolution stamps.
std::string save_trace_csv(const PowerTrace& trace);
/// A one-row file carries no interval; single_row_interval is used then.
PowerTrace load_trace_csv(std::string_view text, Seconds single_row_interval = Seconds{5});

} // namespace peakpause
