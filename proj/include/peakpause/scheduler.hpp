#pragma once

// The peak-pauser control loop: at every hour boundary, pause the managed
// instance group if the hour is predicted expensive, otherwise unpause it.

#include "peakpause/calendar.hpp"
#include "peakpause/peak_predictor.hpp"
#include "peakpause/power_model.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace peakpause {

enum class InstanceState { running, paused };

struct Ack {
    enum class Status { ok, unknown_instance, timeout, failed };
    Status status = Status::ok;
    std::string detail;

    bool ok() const noexcept { return status == Status::ok; }
};

struct StatusReply {
    Ack ack;
    InstanceState state = InstanceState::running;
};

/// Hypervisor adapter. pause on a paused instance and unpause on a running
/// one are no-ops that succeed. Every call must return within deadline,
/// reporting Ack::Status::timeout if it could not complete in time.
class VmController {
public:
    virtual ~VmController() = default;
    virtual Ack pause(const std::string& instance_id, Seconds deadline) = 0;
    virtual Ack unpause(const std::string& instance_id, Seconds deadline) = 0;
    virtual StatusReply status(const std::string& instance_id, Seconds deadline) = 0;
};

/// In-memory controller with scriptable failures and latencies. Latency is
/// simulated: a call whose scripted latency exceeds the deadline times out
/// without sleeping. Thread-safe.
class MockController : public VmController {
public:
    explicit MockController(const std::vector<std::string>& instance_ids);

    Ack pause(const std::string& instance_id, Seconds deadline) override;
    Ack unpause(const std::string& instance_id, Seconds deadline) override;
    StatusReply status(const std::string& instance_id, Seconds deadline) override;

    /// Subsequent pause/unpause calls on id fail until cleared.
    void fail(const std::string& instance_id, bool failing = true);
    void set_latency(const std::string& instance_id, Seconds latency);
    std::size_t call_count() const;

private:
    Ack transition(const std::string& instance_id, Seconds deadline, InstanceState target);

    mutable std::mutex mutex_;
    std::map<std::string, InstanceState> states_;
    std::set<std::string> failing_;
    std::map<std::string, Seconds> latency_;
    std::size_t calls_ = 0;
};

class InstanceGroup {
public:
    /// Throws on an empty list or duplicate ids. All instances start running.
    explicit InstanceGroup(std::vector<std::string> instance_ids);

    const std::vector<std::string>& ids() const noexcept { return ids_; }
    InstanceState state(const std::string& id) const;
    void set_state(const std::string& id, InstanceState s);
    bool all_in(InstanceState s) const;

private:
    std::vector<std::string> ids_;
    std::map<std::string, InstanceState> state_by_id_;
};

enum class Phase { cheap, expensive };

struct SchedulerState {
    ExpensiveHourPolicy policy;
    InstanceGroup group;
    Phase phase = Phase::cheap;
    std::optional<DateTime> last_transition;
};

struct ScheduleEvent {
    enum class Kind { pause_all, unpause_all, noop };
    enum class Outcome { ok, partial, failed };

    DateTime at;
    Kind kind = Kind::noop;
    std::vector<std::string> affected; // every instance attempted
    Outcome outcome = Outcome::ok;
    std::vector<std::pair<std::string, std::string>> failures; // id, reason
};

struct SchedulerConfig {
    Seconds call_deadline{30};
    /// Issue the calls of one transition concurrently.
    bool concurrent_calls = false;
};

struct StepResult {
    SchedulerState state;
    ScheduleEvent event;
};

/// One evaluation of the control rule at `now`. Instances that failed to reach
/// the target state in an earlier step are retried; controller errors are
/// recorded in the event, never thrown.
StepResult step(SchedulerState state, DateTime now, VmController& controller,
                const SchedulerConfig& config = {});

class Clock {
public:
    virtual ~Clock() = default;
    virtual DateTime now() = 0;
    virtual void sleep_until(DateTime t) = 0;
};

/// Simulated time: sleep_until jumps instantly.
class SimulatedClock : public Clock {
public:
    explicit SimulatedClock(DateTime start) : now_(start) {}
    DateTime now() override { return now_; }
    void sleep_until(DateTime t) override
    {
        if (t > now_)
            now_ = t;
    }
    /// Test hook for driving the clock arbitrarily (including backwards).
    void set(DateTime t) { now_ = t; }

private:
    DateTime now_;
};

/// Wall-clock time in the host's local zone, truncated to seconds.
class SystemClock : public Clock {
public:
    DateTime now() override;
    void sleep_until(DateTime t) override;
};

/// Append-only event log; safe to read from other threads while the loop runs.
class EventLog {
public:
    void append(ScheduleEvent event);
    std::vector<ScheduleEvent> snapshot() const;
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::vector<ScheduleEvent> events_;
};

/// Steps at the current clock time and then at each following hour boundary
/// strictly before until. Throws ValidationError if the clock goes backwards.
SchedulerState run_loop(SchedulerState state, Clock& clock, DateTime until, VmController& controller,
                        EventLog& log, const SchedulerConfig& config = {});

std::vector<ScheduleEvent> run_loop(SchedulerState state, Clock& clock, DateTime until,
                                    VmController& controller, const SchedulerConfig& config = {});

/// flag[i] = is_expensive(policy, start + i * sample_interval).
ScheduleMask mask_from_policy(const ExpensiveHourPolicy& policy, DateTime start, Seconds duration,
                              Seconds sample_interval);

/// Time instance_id spent paused within window, replayed from a log.
Seconds paused_time(const std::vector<ScheduleEvent>& events, const std::string& instance_id,
                    Interval window);

const char* to_string(ScheduleEvent::Kind kind);
const char* to_string(ScheduleEvent::Outcome outcome);
const char* to_string(InstanceState state);

} // namespace peakpause
