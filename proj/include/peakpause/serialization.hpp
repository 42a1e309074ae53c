#pragma once

// JSON forms of the machine-facing documents: policies, event logs,
// savings reports and tables, and SLA quotes.

#include "peakpause/accounting.hpp"
#include "peakpause/peak_predictor.hpp"
#include "peakpause/scheduler.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace peakpause {

nlohmann::json to_json(const ExpensiveHourPolicy& policy);
ExpensiveHourPolicy policy_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ScheduleEvent& event);
ScheduleEvent event_from_json(const nlohmann::json& j);
/// One compact JSON object per line.
std::string to_json_lines(const std::vector<ScheduleEvent>& events);
std::vector<ScheduleEvent> events_from_json_lines(std::string_view text);

nlohmann::json to_json(const EnergyCostResult& result);
EnergyCostResult energy_cost_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SavingsReport& report);
SavingsReport savings_report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SavingsTable& table);
nlohmann::json to_json(const GreenSlaQuote& quote);

/// Parses text, rethrowing JSON syntax or type errors as ValidationError.
nlohmann::json parse_json(std::string_view text, const std::string& what);

} // namespace peakpause
