#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flowrecon {

enum class ErrorCode {
    OddLength,
    LengthMismatch,
    NotDyadicallyDivisible,
    MissingColumn,
    EmptyInput,
    MixedSensors,
    LevelOutOfRange,
    NoTypicalDays,
    EmptyDayList,
    LevelMismatch,
    ZeroDailyTotal,
    ConstantInput,
    AllZeroOriginal,
    EmptyResults,
    InvalidParams,
    InvalidConfig,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; code() identifies the
// contract that was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace flowrecon
