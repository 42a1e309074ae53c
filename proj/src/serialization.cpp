#include "peakpause/serialization.hpp"

#include "peakpause/errors.hpp"

#include <sstream>

namespace peakpause {

using nlohmann::json;

namespace {

DateTime datetime_field(const json& j, const char* key)
{
    const auto text = j.at(key).get<std::string>();
    const auto t = parse_datetime(text);
    if (!t)
        throw ValidationError(std::string("malformed date-time in '") + key + "': " + text);
    return *t;
}

template <typename F>
auto guarded(const std::string& what, F&& f)
{
    try {
        return f();
    } catch (const json::exception& e) {
        throw ValidationError("invalid " + what + ": " + e.what());
    }
}

} // namespace

json to_json(const ExpensiveHourPolicy& policy)
{
    return {{"downtime_ratio", policy.downtime_ratio()},
            {"n", policy.n()},
            {"expensive_hours", policy.expensive_hours()},
            {"trained_on", policy.trained_on()}};
}

ExpensiveHourPolicy policy_from_json(const json& j)
{
    return guarded("policy", [&] {
        ExpensiveHourPolicy policy(j.at("downtime_ratio").get<double>(),
                                   j.at("expensive_hours").get<std::vector<int>>(),
                                   j.value("trained_on", std::string{}));
        if (j.contains("n") && j.at("n").get<int>() != policy.n())
            throw ValidationError("policy n=" + std::to_string(j.at("n").get<int>()) + " disagrees with "
                                  + std::to_string(policy.n()) + " listed hours");
        return policy;
    });
}

json to_json(const ScheduleEvent& event)
{
    json failures = json::array();
    for (const auto& [id, reason] : event.failures)
        failures.push_back({{"id", id}, {"reason", reason}});
    json j = {{"at", format_iso_seconds(event.at)},
              {"kind", to_string(event.kind)},
              {"affected", event.affected},
              {"outcome", to_string(event.outcome)}};
    if (!event.failures.empty())
        j["failures"] = failures;
    return j;
}

ScheduleEvent event_from_json(const json& j)
{
    return guarded("event", [&] {
        ScheduleEvent e;
        e.at = datetime_field(j, "at");
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "pause_all")
            e.kind = ScheduleEvent::Kind::pause_all;
        else if (kind == "unpause_all")
            e.kind = ScheduleEvent::Kind::unpause_all;
        else if (kind == "noop")
            e.kind = ScheduleEvent::Kind::noop;
        else
            throw ValidationError("unknown event kind " + kind);
        e.affected = j.at("affected").get<std::vector<std::string>>();
        const auto outcome = j.at("outcome").get<std::string>();
        if (outcome == "ok")
            e.outcome = ScheduleEvent::Outcome::ok;
        else if (outcome == "partial")
            e.outcome = ScheduleEvent::Outcome::partial;
        else if (outcome == "failed")
            e.outcome = ScheduleEvent::Outcome::failed;
        else
            throw ValidationError("unknown event outcome " + outcome);
        if (j.contains("failures"))
            for (const auto& f : j.at("failures"))
                e.failures.emplace_back(f.at("id").get<std::string>(), f.at("reason").get<std::string>());
        return e;
    });
}

std::string to_json_lines(const std::vector<ScheduleEvent>& events)
{
    std::string out;
    for (const auto& e : events) {
        out += to_json(e).dump();
        out += '\n';
    }
    return out;
}

std::vector<ScheduleEvent> events_from_json_lines(std::string_view text)
{
    std::vector<ScheduleEvent> events;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            events.push_back(event_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw ParseError(lineno, e.what());
        } catch (const ValidationError& e) {
            throw ParseError(lineno, e.what());
        }
    }
    return events;
}

json to_json(const EnergyCostResult& r)
{
    return {{"energy_kwh", r.energy},
            {"cost_usd", r.cost},
            {"start", format_iso_seconds(r.interval.begin)},
            {"end", format_iso_seconds(r.interval.end)},
            {"samples", r.samples_used}};
}

EnergyCostResult energy_cost_from_json(const json& j)
{
    return guarded("energy/cost result", [&] {
        EnergyCostResult r;
        r.energy = j.at("energy_kwh").get<double>();
        r.cost = j.at("cost_usd").get<double>();
        r.interval = {datetime_field(j, "start"), datetime_field(j, "end")};
        r.samples_used = j.at("samples").get<Eigen::Index>();
        return r;
    });
}

json to_json(const SavingsReport& r)
{
    return {{"baseline", to_json(r.baseline)},
            {"scheduled", to_json(r.scheduled)},
            {"energy_savings", r.energy_savings},
            {"cost_savings", r.cost_savings},
            {"availability", r.availability},
            {"cpu_time_lost", r.cpu_time_lost},
            {"peak_power_w", r.peak_power},
            {"idle_ratio", r.idle_ratio}};
}

SavingsReport savings_report_from_json(const json& j)
{
    return guarded("savings report", [&] {
        SavingsReport r;
        r.baseline = energy_cost_from_json(j.at("baseline"));
        r.scheduled = energy_cost_from_json(j.at("scheduled"));
        r.energy_savings = j.at("energy_savings").get<double>();
        r.cost_savings = j.at("cost_savings").get<double>();
        r.availability = j.at("availability").get<double>();
        r.cpu_time_lost = j.at("cpu_time_lost").get<double>();
        r.peak_power = j.value("peak_power_w", 0.0);
        r.idle_ratio = j.value("idle_ratio", 0.0);
        return r;
    });
}

json to_json(const SavingsTable& table)
{
    json rows = json::array();
    for (const auto& row : table.cells)
        for (const auto& c : row)
            rows.push_back({{"peak_power_w", c.peak_power},
                            {"idle_ratio", c.idle_ratio},
                            {"energy_savings", c.energy_savings},
                            {"cost_savings", c.cost_savings}});
    return {{"peak_powers_w", table.peak_powers}, {"idle_ratios", table.idle_ratios}, {"cells", rows}};
}

json to_json(const GreenSlaQuote& q)
{
    return {{"availability", q.availability},
            {"hourly_price_usd", q.hourly_price},
            {"annual_chargeback_kg", q.annual_chargeback},
            {"chargeback_delta_vs_normal_kg", q.chargeback_delta_vs_normal}};
}

json parse_json(std::string_view text, const std::string& what)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError("invalid " + what + ": " + e.what());
    }
}

} // namespace peakpause
