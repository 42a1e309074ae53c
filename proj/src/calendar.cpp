#include "peakpause/calendar.hpp"

#include <charconv>
#include <cstdio>
#include <system_error>

namespace peakpause {

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t width, int& out)
{
    if (pos + width > text.size())
        return false;
    for (std::size_t i = pos; i < pos + width; ++i)
        if (text[i] < '0' || text[i] > '9')
            return false;
    const auto* first = text.data() + pos;
    return std::from_chars(first, first + width, out).ec == std::errc{};
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

} // namespace

DateTime make_datetime(int year, unsigned month, unsigned day, int hour, int minute, int second)
{
    using namespace std::chrono;
    return local_days{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}}
           + hours{hour} + minutes{minute} + seconds{second};
}

Date add_months(Date d, int months)
{
    using namespace std::chrono;
    year_month_day ymd{d};
    year_month ym = ymd.year() / ymd.month();
    ym += std::chrono::months{months};
    const auto last = year_month_day_last{ym.year(), month_day_last{ym.month()}}.day();
    const auto day = ymd.day() > last ? last : ymd.day();
    return local_days{ym.year() / ym.month() / day};
}

std::optional<Date> parse_date(std::string_view text)
{
    text = trim(text);
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !read_int(text, 0, 4, y)
        || !read_int(text, 5, 2, m) || !read_int(text, 8, 2, d))
        return std::nullopt;
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok())
        return std::nullopt;
    return local_days{ymd};
}

std::optional<DateTime> parse_datetime(std::string_view text)
{
    text = trim(text);
    auto date = parse_date(text.substr(0, 10));
    if (!date)
        return std::nullopt;
    if (text.size() == 10)
        return DateTime{*date};
    if (text[10] != 'T' && text[10] != ' ')
        return std::nullopt;
    int h = 0, mi = 0, s = 0;
    if (text.size() != 16 && text.size() != 19)
        return std::nullopt;
    if (!read_int(text, 11, 2, h) || text[13] != ':' || !read_int(text, 14, 2, mi))
        return std::nullopt;
    if (text.size() == 19 && (text[16] != ':' || !read_int(text, 17, 2, s)))
        return std::nullopt;
    if (h > 23 || mi > 59 || s > 59)
        return std::nullopt;
    return DateTime{*date} + Hours{h} + std::chrono::minutes{mi} + Seconds{s};
}

std::optional<Interval> parse_interval(std::string_view text)
{
    const auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return std::nullopt;
    const auto begin = parse_datetime(text.substr(0, slash));
    const auto end = parse_datetime(text.substr(slash + 1));
    if (!begin || !end || *end <= *begin)
        return std::nullopt;
    return Interval{*begin, *end};
}

std::string format_date(Date d)
{
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_hour_stamp(DateTime t)
{
    char buf[8];
    std::snprintf(buf, sizeof buf, "T%02d:00", hour_of_day(t));
    return format_date(day_of(t)) + buf;
}

std::string format_iso_seconds(DateTime t)
{
    const std::chrono::hh_mm_ss hms{t - DateTime{day_of(t)}};
    char buf[64];
    std::snprintf(buf, sizeof buf, "T%02ld:%02ld:%02ld", static_cast<long>(hms.hours().count()),
                  static_cast<long>(hms.minutes().count()), static_cast<long>(hms.seconds().count()));
    return format_date(day_of(t)) + buf;
}

std::string format_double(double value)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
        return std::nullopt;
    return value;
}

} // namespace peakpause
