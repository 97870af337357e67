#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flowrecon {

using Date = std::chrono::year_month_day;
using Month = std::chrono::year_month;

struct Timestamp {
    Date date;
    int minute_of_day = 0; // [0, 1440)

    friend bool operator==(const Timestamp&, const Timestamp&) = default;
    friend auto operator<=>(const Timestamp& a, const Timestamp& b)
    {
        if (auto c = a.date <=> b.date; c != 0) {
            return c;
        }
        return a.minute_of_day <=> b.minute_of_day;
    }
};

// "YYYY-MM-DD"
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date date);

// "YYYY-MM"
std::optional<Month> parse_month(std::string_view text);
std::string format_month(Month month);

// strftime-style format restricted to %Y %m %d %H %M %S and literal characters.
// Seconds, when present, must be zero: records live on a minute grid.
std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view format);
std::string format_timestamp(const Timestamp& ts); // ISO-8601 minutes, "YYYY-MM-DDTHH:MM"

// "Mon".."Sun" or full English names, case-insensitive.
std::optional<std::chrono::weekday> parse_weekday(std::string_view text);
std::string format_weekday(std::chrono::weekday wd);

std::chrono::weekday weekday_of(Date date);
unsigned days_in_month(Month month);
std::vector<Date> dates_in_month(Month month);
int days_since_epoch(Date date);

} // namespace flowrecon
