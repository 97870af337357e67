#include "flowrecon/error.hpp"
#include "flowrecon/format.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace flowrecon {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::OddLength: return "OddLength";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotDyadicallyDivisible: return "NotDyadicallyDivisible";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MixedSensors: return "MixedSensors";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::NoTypicalDays: return "NoTypicalDays";
    case ErrorCode::EmptyDayList: return "EmptyDayList";
    case ErrorCode::LevelMismatch: return "LevelMismatch";
    case ErrorCode::ZeroDailyTotal: return "ZeroDailyTotal";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::AllZeroOriginal: return "AllZeroOriginal";
    case ErrorCode::EmptyResults: return "EmptyResults";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

std::string format_number(double value, bool full_precision)
{
    // -0 prints as "-0" and would make otherwise identical reports differ.
    if (value == 0.0) {
        value = 0.0;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, full_precision ? "%.17g" : "%.6g", value);
    return buf;
}

double round_significant(double value, int digits)
{
    if (!std::isfinite(value) || value == 0.0) {
        return value == 0.0 ? 0.0 : value;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return std::strtod(buf, nullptr);
}

} // namespace flowrecon
