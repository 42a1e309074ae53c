#include "cli_app.hpp"

#include "peakpause/accounting.hpp"
#include "peakpause/errors.hpp"
#include "peakpause/experiment_config.hpp"
#include "peakpause/peak_predictor.hpp"
#include "peakpause/power_model.hpp"
#include "peakpause/price_data.hpp"
#include "peakpause/scheduler.hpp"
#include "peakpause/serialization.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <ostream>

namespace peakpause::cli {

namespace {

using nlohmann::json;

/// Experiment flags shared with the --config file. A flag given on the
/// command line overrides the config value; absent flags leave it alone.
class ConfigFlags {
public:
    template <typename T>
    void bind(CLI::App* app, const std::string& name, T ExperimentConfig::*field, const std::string& help)
    {
        auto* opt = app->add_option(name, flags_.*field, help);
        appliers_.emplace_back(opt, [field](ExperimentConfig& c, const ConfigFlags& self) {
            c.*field = self.flags_.*field;
        });
    }

    /// Flag parsed from text by convert.
    void bind_text(CLI::App* app, const std::string& name, const std::string& help,
                   std::function<void(ExperimentConfig&, const std::string&)> convert)
    {
        auto& slot = raw_[name];
        auto* opt = app->add_option(name, slot, help);
        appliers_.emplace_back(opt, [convert, name](ExperimentConfig& c, const ConfigFlags& self) {
            convert(c, self.raw_.at(name));
        });
    }

    ExperimentConfig resolve(const std::string& config_path) const
    {
        auto c = config_path.empty() ? ExperimentConfig{} : load_experiment_config(config_path);
        for (const auto& [opt, apply] : appliers_)
            if (opt->count() > 0)
                apply(c, *this);
        c.validate();
        return c;
    }

private:
    ExperimentConfig flags_;
    std::map<std::string, std::string> raw_;
    std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&, const ConfigFlags&)>>> appliers_;
};

Interval interval_arg(const std::string& text, const char* flag)
{
    const auto iv = parse_interval(text);
    if (!iv)
        throw ValidationError(std::string(flag) + " expects FROM/TO (dates or YYYY-MM-DDTHH:MM), got '" + text + "'");
    return *iv;
}

DateTime datetime_arg(const std::string& text, const char* flag)
{
    const auto t = parse_datetime(text);
    if (!t)
        throw ValidationError(std::string(flag) + " expects YYYY-MM-DD[THH:MM[:SS]], got '" + text + "'");
    return *t;
}

void bind_prices(ConfigFlags& f, CLI::App* app)
{
    f.bind(app, "--prices", &ExperimentConfig::prices, "Hourly price CSV");
    f.bind_text(app, "--format", "Price CSV layout: long or wide",
                [](ExperimentConfig& c, const std::string& v) { c.format = parse_layout(v); });
    f.bind_text(app, "--gap-policy", "Missing hours: reject or impute (hour-of-day mean)",
                [](ExperimentConfig& c, const std::string& v) { c.gap_policy = parse_gap_policy(v); });
}

void bind_model(ConfigFlags& f, CLI::App* app)
{
    f.bind(app, "--peak-power", &ExperimentConfig::peak_powers, "Peak server power in W (repeatable)");
    f.bind(app, "--idle-ratio", &ExperimentConfig::idle_ratios, "Idle/peak power ratio (repeatable)");
    f.bind(app, "--noise-sigma", &ExperimentConfig::noise_sigma, "Std. deviation of power noise in W");
    f.bind(app, "--seed", &ExperimentConfig::seed, "Random seed");
    f.bind_text(app, "--interval", "Sample interval in seconds", [](ExperimentConfig& c, const std::string& v) {
        c.sample_interval = Seconds{std::stol(v)};
    });
}

void bind_timing(ConfigFlags& f, CLI::App* app)
{
    f.bind_text(app, "--start", "Start date-time (YYYY-MM-DD[THH:MM])",
                [](ExperimentConfig& c, const std::string& v) { c.start = datetime_arg(v, "--start"); });
    f.bind_text(app, "--duration", "Duration in hours",
                [](ExperimentConfig& c, const std::string& v) { c.duration = Hours{std::stol(v)}; });
}

PriceSeries load_prices(const ExperimentConfig& c)
{
    if (c.prices.empty())
        throw ValidationError("--prices is required");
    return parse_price_csv(read_file(c.prices), c.format, c.gap_policy, c.prices);
}

ExpensiveHourPolicy load_policy(const ExperimentConfig& c)
{
    if (c.policy.empty())
        throw ValidationError("--policy is required");
    return policy_from_json(parse_json(read_file(c.policy), "policy file " + c.policy));
}

DateTime require_start(const ExperimentConfig& c)
{
    if (!c.start)
        throw ValidationError("--start is required");
    return *c.start;
}

std::string output_path(const ExperimentConfig& c, const std::string& name)
{
    return (std::filesystem::path(c.output_dir) / name).string();
}

void emit(std::ostream& out, const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
        out << text;
    else
        write_file(path, text);
}

int cmd_ingest(const ExperimentConfig& c, const std::string& out_path, std::ostream& out)
{
    const auto series = load_prices(c);
    const auto target = out_path.empty() ? output_path(c, "prices_long.csv") : out_path;
    emit(out, target, to_long_csv(series));
    const auto s = summarize(series);
    const json summary = {{"hours", s.hours},
                          {"days", s.complete_days},
                          {"hour_coverage", std::to_string(s.hours_of_day_covered) + "/24"},
                          {"start", format_hour_stamp(series.start())},
                          {"end", format_hour_stamp(series.end())},
                          {"mean_price", s.mean},
                          {"min_price", s.min},
                          {"max_price", s.max},
                          {"imputed_hours", s.imputed},
                          {"output", target}};
    out << summary.dump(2) << '\n';
    return kOk;
}

int cmd_predict(const ExperimentConfig& c, bool evaluate, bool retrain_daily, const std::string& out_path,
                std::ostream& out)
{
    const auto series = load_prices(c);
    Interval window = series.span();
    if (c.target_day)
        window = history_window(*c.target_day);
    else if (c.window)
        window = *c.window;
    const auto policy = train_policy(series, window, c.downtime_ratio);

    json doc = to_json(policy);
    if (!out_path.empty())
        write_file(out_path, doc.dump(2) + "\n");
    if (evaluate) {
        Interval test_window{window.end, series.end()};
        if (c.test_window)
            test_window = *c.test_window;
        const auto history = series.slice(window);
        auto test = series.slice(test_window);
        // Drop partial days at either end of the held-out window.
        const auto days = test.complete_days();
        if (days.empty())
            throw ValidationError("held-out window contains no complete day");
        test = test.slice({DateTime{days.front()}, DateTime{days.back()} + Hours{24}});
        OracleOptions options;
        options.retrain_daily = retrain_daily;
        const auto eval = evaluate_vs_oracle(history, test, c.downtime_ratio, options);
        doc = {{"policy", doc},
               {"evaluation",
                {{"rmse_usd_per_kwh", eval.rmse},
                 {"relative_error", eval.relative_error},
                 {"days", eval.days},
                 {"test_window", format_hour_stamp(test.start()) + "/" + format_hour_stamp(test.end())},
                 {"retrain_daily", retrain_daily}}}};
    }
    out << doc.dump(2) << '\n';
    return kOk;
}

struct SimulationOutput {
    PowerTrace trace;
    std::vector<ScheduleEvent> events;
};

SimulationOutput simulate(const ExperimentConfig& c, const ExpensiveHourPolicy& policy, DateTime start)
{
    ServerPowerModel model{c.peak_powers.front(), c.idle_ratios.front(), c.noise_sigma, c.seed};
    const Seconds duration = c.duration;
    auto trace = synthesize_trace(model, mask_from_policy(policy, start, duration, c.sample_interval));

    MockController controller(c.instances);
    SimulatedClock clock(start);
    SchedulerState state{policy, InstanceGroup(c.instances), Phase::cheap, std::nullopt};
    auto events = run_loop(std::move(state), clock, start + duration, controller);
    return {std::move(trace), std::move(events)};
}

int cmd_simulate(const ExperimentConfig& c, const std::optional<double>& ewma_alpha, std::ostream& out)
{
    const auto policy = load_policy(c);
    const auto start = require_start(c);
    const auto sim = simulate(c, policy, start);

    const auto trace_path = output_path(c, "trace.csv");
    const auto events_path = output_path(c, "events.jsonl");
    write_file(trace_path, save_trace_csv(sim.trace));
    write_file(events_path, to_json_lines(sim.events));
    json summary = {{"trace", trace_path}, {"events", events_path}, {"samples", sim.trace.size()}};
    if (ewma_alpha) {
        const auto smoothed_path = output_path(c, "trace_ewma.csv");
        write_file(smoothed_path, save_trace_csv(ewma_smooth(sim.trace, *ewma_alpha)));
        summary["smoothed_trace"] = smoothed_path;
    }
    std::size_t pauses = 0, unpauses = 0;
    for (const auto& e : sim.events) {
        pauses += e.kind == ScheduleEvent::Kind::pause_all;
        unpauses += e.kind == ScheduleEvent::Kind::unpause_all;
    }
    summary["pause_all_events"] = pauses;
    summary["unpause_all_events"] = unpauses;
    out << summary.dump(2) << '\n';
    return kOk;
}

struct ReportFlags {
    bool table = false;
    std::string trace;
    std::string baseline_trace;
    std::string out;
    std::string smooth_dir;
};

int cmd_report(const ExperimentConfig& c, const ReportFlags& r, std::ostream& out)
{
    const auto prices = load_prices(c);

    if (!r.trace.empty()) {
        const auto scheduled = load_trace_csv(read_file(r.trace), c.sample_interval);
        if (!r.smooth_dir.empty())
            write_file((std::filesystem::path(r.smooth_dir) / "trace_ewma.csv").string(),
                       save_trace_csv(ewma_smooth(scheduled, c.ewma_alpha)));
        if (r.baseline_trace.empty()) {
            emit(out, r.out, to_json(integrate_cost(scheduled, prices)).dump(2) + "\n");
            return kOk;
        }
        const auto baseline = load_trace_csv(read_file(r.baseline_trace), c.sample_interval);
        if (!r.smooth_dir.empty())
            write_file((std::filesystem::path(r.smooth_dir) / "baseline_ewma.csv").string(),
                       save_trace_csv(ewma_smooth(baseline, c.ewma_alpha)));
        const auto report = compare_traces(baseline, scheduled, load_policy(c), prices);
        emit(out, r.out, to_json(report).dump(2) + "\n");
        return kOk;
    }

    const auto policy = load_policy(c);
    const Interval interval = c.start ? Interval{*c.start, *c.start + c.duration} : prices.span();
    if (!r.smooth_dir.empty()) {
        ServerPowerModel model{c.peak_powers.front(), c.idle_ratios.front(), c.noise_sigma, c.seed};
        auto mask = mask_from_policy(policy, interval.begin, interval.length(), c.sample_interval);
        write_file((std::filesystem::path(r.smooth_dir) / "scheduled_ewma.csv").string(),
                   save_trace_csv(ewma_smooth(synthesize_trace(model, mask), c.ewma_alpha)));
        mask.flags.setConstant(false);
        write_file((std::filesystem::path(r.smooth_dir) / "baseline_ewma.csv").string(),
                   save_trace_csv(ewma_smooth(synthesize_trace(model, mask), c.ewma_alpha)));
    }

    const bool single = c.peak_powers.size() == 1 && c.idle_ratios.size() == 1;
    if (single && !r.table) {
        ServerPowerModel model{c.peak_powers.front(), c.idle_ratios.front(), c.noise_sigma, c.seed};
        emit(out, r.out, to_json(compare(model, policy, prices, interval, c.sample_interval)).dump(2) + "\n");
        return kOk;
    }
    SweepOptions options;
    options.noise_sigma = c.noise_sigma;
    options.seed = c.seed;
    options.sample_interval = c.sample_interval;
    const auto table = savings_table(c.peak_powers, c.idle_ratios, policy, prices, interval, options);
    emit(out, r.out, r.table ? savings_table_csv(table) : to_json(table).dump(2) + "\n");
    return kOk;
}

int cmd_sla(const ExperimentConfig& c, const std::string& report_path, const std::string& out_path,
            std::ostream& out)
{
    if (report_path.empty())
        throw ValidationError("--report is required");
    const auto report = savings_report_from_json(parse_json(read_file(report_path), "report " + report_path));
    const EmissionParams params{cef_from_lb_per_mwh(c.cef_lb_per_mwh), c.pue};
    const auto quote = sla_quote(c.normal_hourly_price, report, params, c.annual_hours);
    emit(out, out_path, to_json(quote).dump(2) + "\n");
    return kOk;
}

int cmd_schedule(const ExperimentConfig& c, const std::string& until_text, bool realtime,
                 const std::string& events_path, std::ostream& out)
{
    const auto policy = load_policy(c);
    std::unique_ptr<Clock> clock;
    if (realtime)
        clock = std::make_unique<SystemClock>();
    else
        clock = std::make_unique<SimulatedClock>(require_start(c));
    const auto until = until_text.empty() ? clock->now() + c.duration : datetime_arg(until_text, "--until");

    // No hypervisor adapter is bundled; the in-memory controller stands in.
    MockController controller(c.instances);
    SchedulerState state{policy, InstanceGroup(c.instances), Phase::cheap, std::nullopt};
    const auto events = run_loop(std::move(state), *clock, until, controller);
    emit(out, events_path, to_json_lines(events));
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"peakpause: pause cloud instances during predicted electricity price peaks"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "Experiment configuration JSON (flags override it)")
        ->check(CLI::ExistingFile);

    std::map<std::string, std::unique_ptr<ConfigFlags>> flags;
    auto sub = [&](const char* name, const char* help) {
        flags[name] = std::make_unique<ConfigFlags>();
        return app.add_subcommand(name, help);
    };

    auto* ingest = sub("ingest", "Validate a price CSV and emit canonical long form plus a summary");
    std::string ingest_out;
    bind_prices(*flags["ingest"], ingest);
    ingest->add_option("--out", ingest_out, "Canonical CSV path ('-' for stdout)");

    auto* predict = sub("predict", "Train an expensive-hour policy from historical prices");
    bool evaluate = false, retrain_daily = false;
    std::string predict_out;
    bind_prices(*flags["predict"], predict);
    flags["predict"]->bind_text(predict, "--window", "Training window FROM/TO (half-open)",
                                [](ExperimentConfig& c, const std::string& v) { c.window = interval_arg(v, "--window"); });
    flags["predict"]->bind_text(predict, "--target-day", "Train on the 3 months before this day",
                                [](ExperimentConfig& c, const std::string& v) {
                                    c.target_day = parse_date(v);
                                    if (!c.target_day)
                                        throw ValidationError("--target-day expects YYYY-MM-DD, got '" + v + "'");
                                });
    flags["predict"]->bind(predict, "--downtime-ratio", &ExperimentConfig::downtime_ratio,
                           "Fraction of the day to pause, in [0,1]");
    predict->add_flag("--evaluate", evaluate, "Compare against the a-priori daily optimum on held-out days");
    flags["predict"]->bind_text(predict, "--test-window", "Held-out window FROM/TO (default: after training)",
                                [](ExperimentConfig& c, const std::string& v) {
                                    c.test_window = interval_arg(v, "--test-window");
                                });
    predict->add_flag("--retrain-daily", retrain_daily, "Retrain before each held-out day");
    predict->add_option("--out", predict_out, "Write the policy JSON here");

    auto* simulate_cmd = sub("simulate", "Simulate the scheduler and a synthetic power trace");
    std::optional<double> sim_ewma;
    flags["simulate"]->bind(simulate_cmd, "--policy", &ExperimentConfig::policy, "Policy JSON");
    bind_model(*flags["simulate"], simulate_cmd);
    bind_timing(*flags["simulate"], simulate_cmd);
    flags["simulate"]->bind(simulate_cmd, "--instances", &ExperimentConfig::instances, "Instance ids");
    flags["simulate"]->bind(simulate_cmd, "--out-dir", &ExperimentConfig::output_dir, "Output directory");
    simulate_cmd->add_option("--ewma", sim_ewma, "Also export an EWMA-smoothed trace with this alpha");

    auto* report = sub("report", "Energy/cost savings of a policy (model sweep or measured traces)");
    ReportFlags report_flags;
    bind_prices(*flags["report"], report);
    flags["report"]->bind(report, "--policy", &ExperimentConfig::policy, "Policy JSON");
    bind_model(*flags["report"], report);
    bind_timing(*flags["report"], report);
    flags["report"]->bind(report, "--ewma-alpha", &ExperimentConfig::ewma_alpha, "Smoothing factor for exports");
    report->add_flag("--table", report_flags.table, "Emit the idle-ratio x peak-power savings table as CSV");
    report->add_option("--trace", report_flags.trace, "Measured (scheduled) power trace CSV");
    report->add_option("--baseline-trace", report_flags.baseline_trace, "Measured unscheduled power trace CSV");
    report->add_option("--smooth-dir", report_flags.smooth_dir, "Export EWMA-smoothed traces here");
    report->add_option("--out", report_flags.out, "Output file (default stdout)");

    auto* sla = sub("sla", "Green-instance price and charge-back quote from a savings report");
    std::string sla_report, sla_out;
    sla->add_option("--report", sla_report, "SavingsReport JSON");
    flags["sla"]->bind(sla, "--normal-price", &ExperimentConfig::normal_hourly_price, "Normal instance $/h");
    flags["sla"]->bind(sla, "--cef", &ExperimentConfig::cef_lb_per_mwh, "Carbon emission factor in lb/MWh");
    flags["sla"]->bind(sla, "--pue", &ExperimentConfig::pue, "Power usage effectiveness");
    flags["sla"]->bind(sla, "--annual-hours", &ExperimentConfig::annual_hours, "Hours per year");
    sla->add_option("--out", sla_out, "Output file (default stdout)");

    auto* schedule = sub("schedule", "Run the pause/unpause loop against the in-memory controller");
    std::string until_text, events_out;
    bool realtime = false;
    flags["schedule"]->bind(schedule, "--policy", &ExperimentConfig::policy, "Policy JSON");
    flags["schedule"]->bind(schedule, "--instances", &ExperimentConfig::instances, "Instance ids");
    bind_timing(*flags["schedule"], schedule);
    schedule->add_option("--until", until_text, "Stop time (default start + duration)");
    schedule->add_flag("--realtime", realtime, "Use the wall clock instead of simulated time");
    schedule->add_option("--events", events_out, "Event log JSON-lines path (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    }

    try {
        if (*ingest)
            return cmd_ingest(flags["ingest"]->resolve(config_path), ingest_out, out);
        if (*predict)
            return cmd_predict(flags["predict"]->resolve(config_path), evaluate, retrain_daily, predict_out, out);
        if (*simulate_cmd)
            return cmd_simulate(flags["simulate"]->resolve(config_path), sim_ewma, out);
        if (*report)
            return cmd_report(flags["report"]->resolve(config_path), report_flags, out);
        if (*sla)
            return cmd_sla(flags["sla"]->resolve(config_path), sla_report, sla_out, out);
        if (*schedule)
            return cmd_schedule(flags["schedule"]->resolve(config_path), until_text, realtime, events_out, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::invalid_argument& e) {
        err << "error: invalid numeric argument (" << e.what() << ")\n";
        return kValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kValidationError;
}

} // namespace peakpause::cli
