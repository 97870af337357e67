#pragma once

#include <string>

namespace flowrecon {

inline constexpr int kReportDigits = 6;

// "%.6g" by default; "%.17g" (round-trippable) with full_precision.
std::string format_number(double value, bool full_precision = false);

// value rounded to `digits` significant digits, for JSON output.
double round_significant(double value, int digits = kReportDigits);

} // namespace flowrecon
