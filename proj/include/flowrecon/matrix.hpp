#pragma once

#include "flowrecon/calendar.hpp"
#include "flowrecon/ingest.hpp"

#include <chrono>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flowrecon {

struct DaySelectionCriteria {
    std::vector<std::chrono::weekday> allowed_weekdays{
        std::chrono::Tuesday, std::chrono::Wednesday, std::chrono::Thursday};
    std::vector<Date> excluded_dates; // holidays, known sensor faults
    Month month{};
};

// Dates in criteria.month with an allowed weekday, not excluded, and whose day
// has no zero-filled slots. Sorted ascending, duplicates collapsed.
// Throws NoTypicalDays when nothing qualifies; InvalidParams for empty weekdays.
std::vector<Date> select_typical_days(std::span<const DaySignal> calendar,
                                      const DaySelectionCriteria& criteria);

enum class Scenario {
    FiveMinuteMean = 1,   // slot-wise mean of the member days
    TwentyMinuteRate = 2, // slot-wise mean, then flattened over 20-minute blocks
};

std::string_view to_string(Scenario scenario) noexcept;

inline constexpr std::size_t kScenario2BlockSlots = 4;

struct MatrixProfile {
    std::vector<double> values;
    Scenario scenario = Scenario::FiveMinuteMean;
    std::vector<Date> member_dates;
};

// Throws EmptyDayList, LengthMismatch when days disagree on slot count.
MatrixProfile build_matrix_scenario1(std::span<const DaySignal> days);
MatrixProfile build_matrix_scenario2(std::span<const DaySignal> days);
MatrixProfile build_matrix(std::span<const DaySignal> days, Scenario scenario);

void write_matrix_csv(std::ostream& out, const MatrixProfile& matrix, bool full_precision = false);
// JSON always carries full precision: it is the file reconstruction reads back.
std::string matrix_json(const MatrixProfile& matrix);
MatrixProfile matrix_from_json(std::string_view text);

} // namespace flowrecon
