#include "flowrecon/calendar.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace flowrecon {

namespace {

bool read_fixed_int(std::string_view text, std::size_t& pos, std::size_t width, int& out)
{
    if (pos + width > text.size()) {
        return false;
    }
    for (std::size_t i = 0; i < width; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[pos + i]))) {
            return false;
        }
    }
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + width, out);
    if (ec != std::errc{}) {
        return false;
    }
    pos += width;
    return true;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

constexpr std::array<std::string_view, 7> kShortNames{"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};
constexpr std::array<std::string_view, 7> kLongNames{"sunday",   "monday", "tuesday", "wednesday",
                                                     "thursday", "friday", "saturday"};

} // namespace

std::optional<Date> parse_date(std::string_view text)
{
    auto ts = parse_timestamp(text, "%Y-%m-%d");
    if (!ts) {
        return std::nullopt;
    }
    return ts->date;
}

std::string format_date(Date date)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

std::optional<Month> parse_month(std::string_view text)
{
    std::size_t pos = 0;
    int y = 0;
    int m = 0;
    if (!read_fixed_int(text, pos, 4, y) || pos >= text.size() || text[pos++] != '-' ||
        !read_fixed_int(text, pos, 2, m) || pos != text.size()) {
        return std::nullopt;
    }
    Month ym{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)}};
    if (!ym.ok()) {
        return std::nullopt;
    }
    return ym;
}

std::string format_month(Month month)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(month.year()),
                  static_cast<unsigned>(month.month()));
    return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view format)
{
    int y = 0;
    int mo = 0;
    int d = 0;
    int h = 0;
    int mi = 0;
    int s = 0;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < format.size(); ++f) {
        if (format[f] == '%' && f + 1 < format.size()) {
            const char spec = format[++f];
            bool ok = false;
            switch (spec) {
            case 'Y': ok = read_fixed_int(text, pos, 4, y); break;
            case 'm': ok = read_fixed_int(text, pos, 2, mo); break;
            case 'd': ok = read_fixed_int(text, pos, 2, d); break;
            case 'H': ok = read_fixed_int(text, pos, 2, h); break;
            case 'M': ok = read_fixed_int(text, pos, 2, mi); break;
            case 'S': ok = read_fixed_int(text, pos, 2, s); break;
            case '%': ok = pos < text.size() && text[pos++] == '%'; break;
            default: return std::nullopt;
            }
            if (!ok) {
                return std::nullopt;
            }
        } else {
            if (pos >= text.size() || text[pos] != format[f]) {
                return std::nullopt;
            }
            ++pos;
        }
    }
    if (pos != text.size() || h > 23 || mi > 59 || s != 0) {
        return std::nullopt;
    }
    Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
              std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) {
        return std::nullopt;
    }
    return Timestamp{date, h * 60 + mi};
}

std::string format_timestamp(const Timestamp& ts)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "T%02d:%02d", ts.minute_of_day / 60, ts.minute_of_day % 60);
    return format_date(ts.date) + buf;
}

std::optional<std::chrono::weekday> parse_weekday(std::string_view text)
{
    const std::string key = lower(text);
    for (unsigned i = 0; i < 7; ++i) {
        if (key == lower(kShortNames[i]) || key == kLongNames[i]) {
            return std::chrono::weekday{i};
        }
    }
    return std::nullopt;
}

std::string format_weekday(std::chrono::weekday wd)
{
    return std::string(kShortNames[wd.c_encoding()]);
}

std::chrono::weekday weekday_of(Date date)
{
    return std::chrono::weekday{std::chrono::sys_days{date}};
}

unsigned days_in_month(Month month)
{
    const auto last = std::chrono::year_month_day_last{month.year(), std::chrono::month_day_last{month.month()}};
    return static_cast<unsigned>(last.day());
}

std::vector<Date> dates_in_month(Month month)
{
    std::vector<Date> out;
    const unsigned n = days_in_month(month);
    out.reserve(n);
    for (unsigned d = 1; d <= n; ++d) {
        out.emplace_back(month.year(), month.month(), std::chrono::day{d});
    }
    return out;
}

int days_since_epoch(Date date)
{
    return std::chrono::sys_days{date}.time_since_epoch().count();
}

} // namespace flowrecon
