#pragma once

#include "flowrecon/calendar.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace flowrecon {

inline constexpr int kMinutesPerDay = 1440;
inline constexpr int kBaseWindowMinutes = 5;
inline constexpr std::size_t kSlotsPerDay = kMinutesPerDay / kBaseWindowMinutes;

constexpr std::size_t slots_per_day(int base_window_minutes)
{
    return static_cast<std::size_t>(kMinutesPerDay / base_window_minutes);
}

struct SensorRecord {
    Timestamp timestamp;
    std::string sensor_id;
    double flow_total = 0.0;
    // Optional per-class flows / mean speeds, in schema order.
    std::vector<std::pair<std::string, double>> extras;
};

/// Column mapping for a loop-detector CSV export. Each concessionaire ships a
/// different layout, so every name is configurable.
struct CsvSchema {
    std::string timestamp_column = "timestamp";
    std::string flow_column = "flow_total";
    // When empty or absent from the header, every row gets default_sensor_id.
    std::string sensor_column = "sensor_id";
    std::string default_sensor_id = "sensor";
    std::vector<std::string> optional_columns;
    char delimiter = ',';
    std::string timestamp_format = "%Y-%m-%dT%H:%M";
    int base_window_minutes = kBaseWindowMinutes;
};

struct RejectedRow {
    std::size_t line = 0; // 1-based, header is line 1
    std::string reason;
};

struct ParseResult {
    std::vector<SensorRecord> records;
    std::size_t rows_read = 0;
    std::size_t duplicates = 0;
    std::vector<RejectedRow> rejected;
};

// Single pass over the stream. Rows with bad timestamps, off-grid timestamps or
// negative / non-numeric flows are rejected; a repeated (sensor, timestamp)
// keeps the first row and counts the rest as duplicates.
// Throws EmptyInput (no header) and MissingColumn.
ParseResult parse_sensor_csv(std::istream& in, const CsvSchema& schema = {});

struct DaySignal {
    Date date{};
    std::string sensor_id;
    std::vector<double> values;
    std::vector<std::size_t> filled_slots; // ascending
    int base_window_minutes = kBaseWindowMinutes;

    double total() const noexcept;
    bool fault_free() const noexcept { return filled_slots.empty(); }
};

// Records for other dates are ignored. Slots without a record are zero-filled
// and listed in filled_slots. Throws MixedSensors.
DaySignal assemble_day(std::span<const SensorRecord> records, Date date,
                       int base_window_minutes = kBaseWindowMinutes);

// Inverse of assemble_day: one record per observed (non-filled) slot.
std::vector<SensorRecord> flatten_day(const DaySignal& day);

struct AggregatedSignal {
    int level = 0;
    int window_minutes = 0;
    std::vector<double> values;
    Date source_date{};
};

// Sums consecutive blocks of 2^level slots. Throws LevelOutOfRange unless
// 1 <= level <= max_levels(slot count).
AggregatedSignal aggregate(const DaySignal& day, int level);

enum class GapSeverity { UpToHour, UpToDay, UpToWeek, OverWeek };

std::string_view to_string(GapSeverity severity) noexcept;
// Thresholds scale with the grid: 1 h, 1 day, 1 week of slots.
GapSeverity classify_gap(std::size_t missing_slots, int base_window_minutes = kBaseWindowMinutes);

struct MonthGap {
    Month month{};
    std::size_t expected_slots = 0;
    std::size_t missing_slots = 0;
    GapSeverity severity = GapSeverity::UpToHour;
};

struct GapReport {
    std::string sensor_id;
    std::vector<MonthGap> months;
};

// Per-month count of grid slots in [first, last] with no record. Records of one
// sensor only; throws MixedSensors otherwise.
GapReport gap_report(std::span<const SensorRecord> records, Month first, Month last,
                     int base_window_minutes = kBaseWindowMinutes);

void write_gap_report_csv(std::ostream& out, std::span<const GapReport> reports);
std::string gap_report_json(std::span<const GapReport> reports);

// Day-store file: "timestamp,flow" with one row per slot.
void write_day_csv(std::ostream& out, const DaySignal& day, bool full_precision = true);
// Reads a day-store file written by write_day_csv. Filled-slot information is
// not part of that format and must be restored by the caller.
DaySignal read_day_csv(std::istream& in, std::string sensor_id);

// Records in the ingest schema: "timestamp,sensor_id,flow_total".
void write_records_csv(std::ostream& out, std::span<const DaySignal> days, bool full_precision = true);

} // namespace flowrecon
