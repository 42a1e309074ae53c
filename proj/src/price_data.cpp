#include "peakpause/price_data.hpp"

#include "peakpause/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace peakpause {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
}

std::string normalized(std::string_view s)
{
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

bool is_blank(std::string_view s)
{
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

struct Row {
    std::size_t line;
    PricePoint point;
};

double parse_price(std::string_view cell, std::size_t line)
{
    const auto value = parse_double(cell);
    if (!value)
        throw ParseError(line, "malformed price '" + std::string(cell) + "'");
    if (!std::isfinite(*value))
        throw ParseError(line, "non-finite price '" + std::string(cell) + "'");
    return *value;
}

std::vector<Row> read_long(std::string_view text)
{
    std::vector<Row> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line))
            continue;
        if (!header_seen) {
            if (normalized(line) != "timestamp,price_usd_per_kwh")
                throw ParseError(lineno, "expected header 'timestamp,price_usd_per_kwh'");
            header_seen = true;
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != 2)
            throw ParseError(lineno, "expected 2 columns, found " + std::to_string(cells.size()));
        const auto ts = parse_datetime(cells[0]);
        if (!ts)
            throw ParseError(lineno, "malformed timestamp '" + std::string(cells[0]) + "'");
        if (!is_hour_aligned(*ts))
            throw ParseError(lineno, "timestamp '" + std::string(cells[0]) + "' is not hour-aligned");
        rows.push_back({lineno, {*ts, parse_price(cells[1], lineno)}});
    }
    if (!header_seen)
        throw ValidationError("empty price file");
    return rows;
}

std::vector<Row> read_wide(std::string_view text)
{
    std::vector<Row> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line))
            continue;
        const auto cells = split(line, ',');
        if (!header_seen) {
            bool ok = cells.size() == 25 && normalized(cells[0]) == "date";
            for (int h = 0; ok && h < 24; ++h) {
                char expect[4];
                std::snprintf(expect, sizeof expect, "h%02d", h);
                ok = normalized(cells[h + 1]) == expect;
            }
            if (!ok)
                throw ParseError(lineno, "expected header 'date,h00,...,h23'");
            header_seen = true;
            continue;
        }
        if (cells.size() != 25)
            throw ParseError(lineno, "expected 25 columns, found " + std::to_string(cells.size()));
        const auto day = parse_date(cells[0]);
        if (!day)
            throw ParseError(lineno, "malformed date '" + std::string(cells[0]) + "'");
        for (int h = 0; h < 24; ++h) {
            if (is_blank(cells[h + 1]))
                continue; // missing hour, handled by the gap policy
            rows.push_back({lineno, {DateTime{*day} + Hours{h}, parse_price(cells[h + 1], lineno)}});
        }
    }
    if (!header_seen)
        throw ValidationError("empty price file");
    return rows;
}

} // namespace

PriceSeries::PriceSeries(DateTime start, Eigen::VectorXd prices, std::string source_label,
                         std::vector<DateTime> imputed)
    : start_(start), prices_(std::move(prices)), label_(std::move(source_label)),
      imputed_(std::move(imputed))
{
    if (prices_.size() == 0)
        throw ValidationError("price series is empty");
    if (!is_hour_aligned(start_))
        throw ValidationError("price series start " + format_iso_seconds(start_) + " is not hour-aligned");
    if (!prices_.allFinite())
        throw ValidationError("price series contains non-finite prices");
}

PriceSeries PriceSeries::from_points(const std::vector<PricePoint>& points, std::string source_label)
{
    if (points.empty())
        throw ValidationError("price series is empty");
    Eigen::VectorXd prices(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto expected = points.front().timestamp + Hours{static_cast<long>(i)};
        if (points[i].timestamp != expected)
            throw ValidationError("expected hourly point at " + format_hour_stamp(expected) + ", found "
                                  + format_iso_seconds(points[i].timestamp));
        prices[static_cast<Eigen::Index>(i)] = points[i].price;
    }
    return PriceSeries(points.front().timestamp, std::move(prices), std::move(source_label));
}

PricePoint PriceSeries::point(std::size_t i) const
{
    return {start_ + Hours{static_cast<long>(i)}, prices_[static_cast<Eigen::Index>(i)]};
}

std::vector<PricePoint> PriceSeries::points() const
{
    std::vector<PricePoint> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i)
        out.push_back(point(i));
    return out;
}

double PriceSeries::price_at(DateTime t) const
{
    if (!covers(t))
        throw ValidationError("no price for " + format_iso_seconds(t));
    return prices_[std::chrono::floor<Hours>(t - start_).count()];
}

PriceSeries PriceSeries::slice(Interval window) const
{
    const auto lo = std::max(window.begin, start_);
    const auto hi = std::min(window.end, end());
    // Hours partially inside the window count if their start is inside it.
    const auto first = std::chrono::ceil<Hours>(lo - start_).count();
    const auto last = std::chrono::ceil<Hours>(hi - start_).count();
    if (last <= first)
        throw ValidationError("window [" + format_iso_seconds(window.begin) + ", "
                              + format_iso_seconds(window.end) + ") does not overlap the price series");
    std::vector<DateTime> imputed;
    const auto sub_start = start_ + Hours{first};
    const auto sub_end = start_ + Hours{last};
    for (auto t : imputed_)
        if (sub_start <= t && t < sub_end)
            imputed.push_back(t);
    return PriceSeries(sub_start, prices_.segment(first, last - first), label_, std::move(imputed));
}

std::vector<Date> PriceSeries::complete_days() const
{
    std::vector<Date> days;
    auto day = day_of(start_);
    if (DateTime{day} != start_)
        day += std::chrono::days{1};
    for (; DateTime{day} + Hours{24} <= end(); day += std::chrono::days{1})
        days.push_back(day);
    return days;
}

bool PriceSeries::all_days_complete() const
{
    return hour_of_day(start_) == 0 && size() % 24 == 0;
}

Eigen::Matrix<double, 24, 1> PriceSeries::day_prices(Date day) const
{
    const auto begin = DateTime{day};
    if (begin < start_ || begin + Hours{24} > end())
        throw ValidationError("day " + format_date(day) + " is not fully covered by the price series");
    return prices_.segment<24>((begin - start_) / Hours{1});
}

PriceSeries parse_price_csv(std::string_view text, CsvLayout layout, GapPolicy gaps,
                            std::string source_label)
{
    auto rows = layout == CsvLayout::long_form ? read_long(text) : read_wide(text);
    if (rows.empty())
        throw ValidationError("price file has a header but no data rows");

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.point.timestamp < b.point.timestamp; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].point.timestamp == rows[i - 1].point.timestamp) {
            const auto& later = rows[i].line > rows[i - 1].line ? rows[i] : rows[i - 1];
            throw ParseError(later.line, "duplicate timestamp " + format_hour_stamp(later.point.timestamp)
                                             + " (repeated hour, e.g. a DST fold)");
        }

    const auto start = rows.front().point.timestamp;
    const auto hours = (rows.back().point.timestamp - start) / Hours{1} + 1;
    Eigen::VectorXd prices(hours);
    std::vector<bool> present(static_cast<std::size_t>(hours), false);
    for (const auto& r : rows) {
        const auto idx = (r.point.timestamp - start) / Hours{1};
        prices[idx] = r.point.price;
        present[static_cast<std::size_t>(idx)] = true;
    }

    std::vector<DateTime> missing;
    for (Eigen::Index i = 0; i < hours; ++i)
        if (!present[static_cast<std::size_t>(i)])
            missing.push_back(start + Hours{i});
    if (missing.empty())
        return PriceSeries(start, std::move(prices), std::move(source_label));

    if (gaps == GapPolicy::reject) {
        std::string msg = "gap in price series: missing hour " + format_hour_stamp(missing.front());
        if (missing.size() > 1)
            msg += " (and " + std::to_string(missing.size() - 1) + " more)";
        throw ValidationError(msg);
    }

    std::array<double, 24> sum{};
    std::array<std::size_t, 24> count{};
    for (const auto& r : rows) {
        const auto h = static_cast<std::size_t>(hour_of_day(r.point.timestamp));
        sum[h] += r.point.price;
        ++count[h];
    }
    for (auto t : missing) {
        const auto h = static_cast<std::size_t>(hour_of_day(t));
        if (count[h] == 0)
            throw ValidationError("cannot impute " + format_hour_stamp(t) + ": no samples for hour "
                                  + std::to_string(h) + " anywhere in the file");
        prices[(t - start) / Hours{1}] = sum[h] / static_cast<double>(count[h]);
    }
    if (!source_label.empty())
        source_label += "; ";
    source_label += "imputed " + std::to_string(missing.size()) + " missing hour(s) with hour-of-day means";
    return PriceSeries(start, std::move(prices), std::move(source_label), std::move(missing));
}

std::string to_long_csv(const PriceSeries& series)
{
    std::string out = "timestamp,price_usd_per_kwh\n";
    out.reserve(out.size() + series.size() * 32);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto p = series.point(i);
        out += format_hour_stamp(p.timestamp);
        out += ',';
        out += format_double(p.price);
        out += '\n';
    }
    return out;
}

HourlyProfile hourly_profile(const PriceSeries& series, Interval window)
{
    if (window.empty())
        throw ValidationError("empty profile window");
    HourlyProfile profile;
    Eigen::Array<double, 24, 1> sum = Eigen::Array<double, 24, 1>::Zero();
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto p = series.point(i);
        if (!window.contains(p.timestamp))
            continue;
        const auto h = hour_of_day(p.timestamp);
        sum[h] += p.price;
        ++profile.sample_count_by_hour[static_cast<std::size_t>(h)];
    }
    for (int h = 0; h < 24; ++h) {
        const auto n = profile.sample_count_by_hour[static_cast<std::size_t>(h)];
        if (n == 0)
            throw ValidationError("no price samples for hour " + std::to_string(h) + " in window ["
                                  + format_iso_seconds(window.begin) + ", "
                                  + format_iso_seconds(window.end) + ")");
        profile.mean_price_by_hour[h] = sum[h] / static_cast<double>(n);
    }
    return profile;
}

std::array<int, 24> rank_hours(const Eigen::Ref<const Eigen::Matrix<double, 24, 1>>& day)
{
    std::array<int, 24> order{};
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return day[a] > day[b]; });
    return order;
}

std::array<std::size_t, 24> peak_hour_histogram(const PriceSeries& series, int top_k)
{
    if (top_k < 1 || top_k > 24)
        throw ValidationError("top_k must be in 1..24, got " + std::to_string(top_k));
    if (!series.all_days_complete())
        throw ValidationError("peak hour histogram needs complete days; series starts at "
                              + format_hour_stamp(series.start()) + " with "
                              + std::to_string(series.size()) + " hours");
    std::array<std::size_t, 24> counts{};
    for (auto day : series.complete_days()) {
        const auto order = rank_hours(series.day_prices(day));
        for (int k = 0; k < top_k; ++k)
            ++counts[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
    }
    return counts;
}

PriceSummary summarize(const PriceSeries& series)
{
    PriceSummary s;
    s.hours = series.size();
    s.complete_days = series.complete_days().size();
    // Coverage counts only hours observed in the source, not imputed ones.
    std::array<bool, 24> seen{};
    const auto& imputed = series.imputed_hours();
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto t = series.point(i).timestamp;
        if (!std::binary_search(imputed.begin(), imputed.end(), t))
            seen[static_cast<std::size_t>(hour_of_day(t))] = true;
    }
    s.hours_of_day_covered = static_cast<int>(std::count(seen.begin(), seen.end(), true));
    s.mean = series.prices().mean();
    s.min = series.prices().minCoeff();
    s.max = series.prices().maxCoeff();
    s.imputed = series.imputed_hours().size();
    return s;
}

} // namespace peakpause
