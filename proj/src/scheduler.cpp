#include "peakpause/scheduler.hpp"

#include "peakpause/errors.hpp"

#include <algorithm>
#include <ctime>
#include <future>
#include <thread>

namespace peakpause {

MockController::MockController(const std::vector<std::string>& instance_ids)
{
    for (const auto& id : instance_ids)
        states_[id] = InstanceState::running;
}

Ack MockController::transition(const std::string& instance_id, Seconds deadline, InstanceState target)
{
    std::lock_guard lock(mutex_);
    ++calls_;
    const auto it = states_.find(instance_id);
    if (it == states_.end())
        return {Ack::Status::unknown_instance, "unknown instance " + instance_id};
    if (const auto lat = latency_.find(instance_id); lat != latency_.end() && lat->second > deadline)
        return {Ack::Status::timeout, "no response within " + std::to_string(deadline.count()) + " s"};
    if (failing_.count(instance_id))
        return {Ack::Status::failed, "scripted failure"};
    it->second = target;
    return {};
}

Ack MockController::pause(const std::string& instance_id, Seconds deadline)
{
    return transition(instance_id, deadline, InstanceState::paused);
}

Ack MockController::unpause(const std::string& instance_id, Seconds deadline)
{
    return transition(instance_id, deadline, InstanceState::running);
}

StatusReply MockController::status(const std::string& instance_id, Seconds deadline)
{
    std::lock_guard lock(mutex_);
    ++calls_;
    const auto it = states_.find(instance_id);
    if (it == states_.end())
        return {{Ack::Status::unknown_instance, "unknown instance " + instance_id}, InstanceState::running};
    if (const auto lat = latency_.find(instance_id); lat != latency_.end() && lat->second > deadline)
        return {{Ack::Status::timeout, "no response within " + std::to_string(deadline.count()) + " s"},
                it->second};
    return {{}, it->second};
}

void MockController::fail(const std::string& instance_id, bool failing)
{
    std::lock_guard lock(mutex_);
    if (failing)
        failing_.insert(instance_id);
    else
        failing_.erase(instance_id);
}

void MockController::set_latency(const std::string& instance_id, Seconds latency)
{
    std::lock_guard lock(mutex_);
    latency_[instance_id] = latency;
}

std::size_t MockController::call_count() const
{
    std::lock_guard lock(mutex_);
    return calls_;
}

InstanceGroup::InstanceGroup(std::vector<std::string> instance_ids) : ids_(std::move(instance_ids))
{
    if (ids_.empty())
        throw ValidationError("instance group must not be empty");
    for (const auto& id : ids_)
        if (!state_by_id_.emplace(id, InstanceState::running).second)
            throw ValidationError("duplicate instance id " + id);
}

InstanceState InstanceGroup::state(const std::string& id) const
{
    const auto it = state_by_id_.find(id);
    if (it == state_by_id_.end())
        throw ValidationError("instance " + id + " is not in the group");
    return it->second;
}

void InstanceGroup::set_state(const std::string& id, InstanceState s)
{
    const auto it = state_by_id_.find(id);
    if (it == state_by_id_.end())
        throw ValidationError("instance " + id + " is not in the group");
    it->second = s;
}

bool InstanceGroup::all_in(InstanceState s) const
{
    return std::all_of(state_by_id_.begin(), state_by_id_.end(), [s](const auto& kv) { return kv.second == s; });
}

StepResult step(SchedulerState state, DateTime now, VmController& controller, const SchedulerConfig& config)
{
    const bool expensive = is_expensive(state.policy, now);
    const auto target = expensive ? InstanceState::paused : InstanceState::running;

    ScheduleEvent event;
    event.at = now;
    for (const auto& id : state.group.ids())
        if (state.group.state(id) != target)
            event.affected.push_back(id);

    if (event.affected.empty()) {
        state.phase = expensive ? Phase::expensive : Phase::cheap;
        return {std::move(state), std::move(event)};
    }

    event.kind = expensive ? ScheduleEvent::Kind::pause_all : ScheduleEvent::Kind::unpause_all;
    auto call = [&controller, &config, expensive](const std::string& id) {
        try {
            return expensive ? controller.pause(id, config.call_deadline)
                             : controller.unpause(id, config.call_deadline);
        } catch (const std::exception& e) {
            return Ack{Ack::Status::failed, e.what()};
        }
    };

    std::vector<Ack> acks;
    if (config.concurrent_calls) {
        std::vector<std::future<Ack>> pending;
        for (const auto& id : event.affected)
            pending.push_back(std::async(std::launch::async, call, std::cref(id)));
        for (auto& f : pending)
            acks.push_back(f.get());
    } else {
        for (const auto& id : event.affected)
            acks.push_back(call(id));
    }

    std::size_t succeeded = 0;
    for (std::size_t i = 0; i < acks.size(); ++i) {
        if (acks[i].ok()) {
            state.group.set_state(event.affected[i], target);
            ++succeeded;
        } else {
            event.failures.emplace_back(event.affected[i], acks[i].detail);
        }
    }
    event.outcome = succeeded == acks.size() ? ScheduleEvent::Outcome::ok
                    : succeeded == 0         ? ScheduleEvent::Outcome::failed
                                             : ScheduleEvent::Outcome::partial;
    state.phase = expensive ? Phase::expensive : Phase::cheap;
    state.last_transition = now;
    return {std::move(state), std::move(event)};
}

DateTime SystemClock::now()
{
    const auto wall = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(wall);
    std::tm local{};
    localtime_r(&tt, &local);
    return make_datetime(local.tm_year + 1900, static_cast<unsigned>(local.tm_mon + 1),
                         static_cast<unsigned>(local.tm_mday), local.tm_hour, local.tm_min, local.tm_sec);
}

void SystemClock::sleep_until(DateTime t)
{
    const auto remaining = t - now();
    if (remaining > Seconds{0})
        std::this_thread::sleep_for(remaining);
}

void EventLog::append(ScheduleEvent event)
{
    std::lock_guard lock(mutex_);
    events_.push_back(std::move(event));
}

std::vector<ScheduleEvent> EventLog::snapshot() const
{
    std::lock_guard lock(mutex_);
    return events_;
}

std::size_t EventLog::size() const
{
    std::lock_guard lock(mutex_);
    return events_.size();
}

SchedulerState run_loop(SchedulerState state, Clock& clock, DateTime until, VmController& controller,
                        EventLog& log, const SchedulerConfig& config)
{
    auto previous = clock.now();
    auto now = previous;
    while (now < until) {
        auto result = step(std::move(state), now, controller, config);
        state = std::move(result.state);
        log.append(std::move(result.event));

        const auto next_hour = floor_hour(now) + Hours{1};
        if (next_hour >= until)
            break;
        clock.sleep_until(next_hour);
        now = clock.now();
        if (now < previous)
            throw ValidationError("clock went backwards from " + format_iso_seconds(previous) + " to "
                                  + format_iso_seconds(now));
        previous = now;
        // Woke early (spurious or adjusted clock): wait out the rest of the hour.
        while (now < next_hour) {
            clock.sleep_until(next_hour);
            now = clock.now();
            if (now < previous)
                throw ValidationError("clock went backwards from " + format_iso_seconds(previous) + " to "
                                      + format_iso_seconds(now));
            previous = now;
        }
    }
    return state;
}

std::vector<ScheduleEvent> run_loop(SchedulerState state, Clock& clock, DateTime until,
                                    VmController& controller, const SchedulerConfig& config)
{
    EventLog log;
    run_loop(std::move(state), clock, until, controller, log, config);
    return log.snapshot();
}

ScheduleMask mask_from_policy(const ExpensiveHourPolicy& policy, DateTime start, Seconds duration,
                              Seconds sample_interval)
{
    if (sample_interval <= Seconds{0})
        throw ValidationError("sample interval must be positive");
    if (duration <= Seconds{0} || duration % sample_interval != Seconds{0})
        throw ValidationError("duration must be a positive multiple of the sample interval");
    ScheduleMask mask;
    mask.start = start;
    mask.sample_interval = sample_interval;
    mask.flags.resize(duration / sample_interval);
    for (Eigen::Index i = 0; i < mask.size(); ++i)
        mask.flags[i] = is_expensive(policy, mask.time_at(i));
    return mask;
}

Seconds paused_time(const std::vector<ScheduleEvent>& events, const std::string& instance_id,
                    Interval window)
{
    Seconds total{0};
    std::optional<DateTime> paused_since;
    auto close = [&](DateTime t) {
        const auto lo = std::max(*paused_since, window.begin);
        const auto hi = std::min(t, window.end);
        if (hi > lo)
            total += hi - lo;
        paused_since.reset();
    };
    for (const auto& e : events) {
        if (e.kind == ScheduleEvent::Kind::noop)
            continue;
        const bool attempted = std::find(e.affected.begin(), e.affected.end(), instance_id) != e.affected.end();
        const bool failed = std::any_of(e.failures.begin(), e.failures.end(),
                                        [&](const auto& f) { return f.first == instance_id; });
        if (!attempted || failed)
            continue;
        if (e.kind == ScheduleEvent::Kind::pause_all && !paused_since)
            paused_since = e.at;
        else if (e.kind == ScheduleEvent::Kind::unpause_all && paused_since)
            close(e.at);
    }
    if (paused_since)
        close(window.end);
    return total;
}

const char* to_string(ScheduleEvent::Kind kind)
{
    switch (kind) {
    case ScheduleEvent::Kind::pause_all: return "pause_all";
    case ScheduleEvent::Kind::unpause_all: return "unpause_all";
    case ScheduleEvent::Kind::noop: return "noop";
    }
    return "noop";
}

const char* to_string(ScheduleEvent::Outcome outcome)
{
    switch (outcome) {
    case ScheduleEvent::Outcome::ok: return "ok";
    case ScheduleEvent::Outcome::partial: return "partial";
    case ScheduleEvent::Outcome::failed: return "failed";
    }
    return "failed";
}

const char* to_string(InstanceState state)
{
    return state == InstanceState::paused ? "paused" : "running";
}

} // namespace peakpause
