#include "flowrecon/matrix.hpp"
#include "flowrecon/error.hpp"
#include "flowrecon/format.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <ostream>

namespace flowrecon {

std::vector<Date> select_typical_days(std::span<const DaySignal> calendar, const DaySelectionCriteria& criteria)
{
    if (criteria.allowed_weekdays.empty()) {
        throw Error(ErrorCode::InvalidParams, "allowed_weekdays must not be empty");
    }
    std::vector<Date> out;
    for (const auto& day : calendar) {
        if (Month{day.date.year(), day.date.month()} != criteria.month) {
            continue;
        }
        const auto wd = weekday_of(day.date);
        if (std::find(criteria.allowed_weekdays.begin(), criteria.allowed_weekdays.end(), wd) ==
            criteria.allowed_weekdays.end()) {
            continue;
        }
        if (std::find(criteria.excluded_dates.begin(), criteria.excluded_dates.end(), day.date) !=
            criteria.excluded_dates.end()) {
            continue;
        }
        if (!day.fault_free()) {
            continue;
        }
        out.push_back(day.date);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty()) {
        throw Error(ErrorCode::NoTypicalDays, "no fault-free typical day in " + format_month(criteria.month));
    }
    return out;
}

std::string_view to_string(Scenario scenario) noexcept
{
    switch (scenario) {
    case Scenario::FiveMinuteMean: return "scenario1";
    case Scenario::TwentyMinuteRate: return "scenario2";
    }
    return "?";
}

MatrixProfile build_matrix_scenario1(std::span<const DaySignal> days)
{
    if (days.empty()) {
        throw Error(ErrorCode::EmptyDayList, "matrix needs at least one day");
    }
    const std::size_t n = days.front().values.size();
    MatrixProfile out;
    out.scenario = Scenario::FiveMinuteMean;
    out.values.assign(n, 0.0);
    for (const auto& day : days) {
        if (day.values.size() != n) {
            throw Error(ErrorCode::LengthMismatch, "matrix member " + format_date(day.date) + " has " +
                                                       std::to_string(day.values.size()) + " slots, expected " +
                                                       std::to_string(n));
        }
        for (std::size_t i = 0; i < n; ++i) {
            out.values[i] += day.values[i];
        }
        out.member_dates.push_back(day.date);
    }
    const double count = static_cast<double>(days.size());
    for (double& v : out.values) {
        v /= count;
    }
    std::sort(out.member_dates.begin(), out.member_dates.end());
    return out;
}

MatrixProfile build_matrix_scenario2(std::span<const DaySignal> days)
{
    MatrixProfile out = build_matrix_scenario1(days);
    out.scenario = Scenario::TwentyMinuteRate;
    if (out.values.size() % kScenario2BlockSlots != 0) {
        throw Error(ErrorCode::NotDyadicallyDivisible,
                    "profile length " + std::to_string(out.values.size()) + " is not a multiple of 4 slots");
    }
    for (std::size_t b = 0; b < out.values.size(); b += kScenario2BlockSlots) {
        double s = 0.0;
        for (std::size_t j = 0; j < kScenario2BlockSlots; ++j) {
            s += out.values[b + j];
        }
        const double mean = s / static_cast<double>(kScenario2BlockSlots);
        std::fill_n(out.values.begin() + static_cast<std::ptrdiff_t>(b), kScenario2BlockSlots, mean);
    }
    return out;
}

MatrixProfile build_matrix(std::span<const DaySignal> days, Scenario scenario)
{
    return scenario == Scenario::TwentyMinuteRate ? build_matrix_scenario2(days) : build_matrix_scenario1(days);
}

void write_matrix_csv(std::ostream& out, const MatrixProfile& matrix, bool full_precision)
{
    out << "slot,value\n";
    for (std::size_t i = 0; i < matrix.values.size(); ++i) {
        out << i << ',' << format_number(matrix.values[i], full_precision) << '\n';
    }
}

std::string matrix_json(const MatrixProfile& matrix)
{
    nlohmann::ordered_json members = nlohmann::ordered_json::array();
    for (const auto& d : matrix.member_dates) {
        members.push_back(format_date(d));
    }
    nlohmann::ordered_json j{{"scenario", static_cast<int>(matrix.scenario)},
                             {"slots", matrix.values.size()},
                             {"member_dates", std::move(members)},
                             {"values", matrix.values}};
    return j.dump(2) + "\n";
}

MatrixProfile matrix_from_json(std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("matrix JSON: ") + e.what());
    }
    MatrixProfile m;
    try {
        const int scenario = j.at("scenario").get<int>();
        if (scenario != 1 && scenario != 2) {
            throw Error(ErrorCode::InvalidConfig, "matrix JSON: scenario must be 1 or 2");
        }
        m.scenario = static_cast<Scenario>(scenario);
        m.values = j.at("values").get<std::vector<double>>();
        for (const auto& d : j.at("member_dates")) {
            auto date = parse_date(d.get<std::string>());
            if (!date) {
                throw Error(ErrorCode::InvalidConfig, "matrix JSON: bad member date");
            }
            m.member_dates.push_back(*date);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("matrix JSON: ") + e.what());
    }
    return m;
}

} // namespace flowrecon
