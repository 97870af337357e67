#include "flowrecon/ingest.hpp"
#include "flowrecon/error.hpp"
#include "flowrecon/format.hpp"
#include "flowrecon/wavelet.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <unordered_set>

namespace flowrecon {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

// RFC 4180 style: fields may be double-quoted, "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line, char delimiter)
{
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter) {
            fields.emplace_back(trim(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.emplace_back(trim(field));
    return fields;
}

std::optional<double> parse_non_negative(std::string_view text)
{
    text = trim(text);
    if (text.empty()) {
        return std::nullopt;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value) || value < 0.0) {
        return std::nullopt;
    }
    return value;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header, std::string_view name)
{
    if (name.empty()) {
        return std::nullopt;
    }
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - header.begin());
}

void check_single_sensor(std::span<const SensorRecord> records)
{
    for (const auto& r : records) {
        if (r.sensor_id != records.front().sensor_id) {
            throw Error(ErrorCode::MixedSensors,
                        "records mix sensors '" + records.front().sensor_id + "' and '" + r.sensor_id + "'");
        }
    }
}

Month month_of(Date d)
{
    return Month{d.year(), d.month()};
}

} // namespace

ParseResult parse_sensor_csv(std::istream& in, const CsvSchema& schema)
{
    if (schema.base_window_minutes <= 0 || kMinutesPerDay % schema.base_window_minutes != 0) {
        throw Error(ErrorCode::InvalidConfig,
                    "base window must divide 1440 minutes, got " + std::to_string(schema.base_window_minutes));
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::EmptyInput, "no header row");
    }
    if (line.starts_with("\xEF\xBB\xBF")) {
        line.erase(0, 3);
    }
    if (trim(line).empty()) {
        throw Error(ErrorCode::EmptyInput, "empty header row");
    }
    const auto header = split_csv_line(line, schema.delimiter);

    const auto ts_col = find_column(header, schema.timestamp_column);
    if (!ts_col) {
        throw Error(ErrorCode::MissingColumn, "required column '" + schema.timestamp_column + "' not in header");
    }
    const auto flow_col = find_column(header, schema.flow_column);
    if (!flow_col) {
        throw Error(ErrorCode::MissingColumn, "required column '" + schema.flow_column + "' not in header");
    }
    const auto sensor_col = find_column(header, schema.sensor_column);
    std::vector<std::pair<std::string, std::size_t>> extra_cols;
    for (const auto& name : schema.optional_columns) {
        if (auto c = find_column(header, name)) {
            extra_cols.emplace_back(name, *c);
        }
    }

    ParseResult result;
    std::set<std::pair<std::string, Timestamp>> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        ++result.rows_read;
        const auto fields = split_csv_line(line, schema.delimiter);
        auto reject = [&](std::string reason) { result.rejected.push_back({line_no, std::move(reason)}); };

        const std::size_t needed = std::max({*ts_col, *flow_col, sensor_col.value_or(0)}) + 1;
        if (fields.size() < needed) {
            reject("expected at least " + std::to_string(needed) + " fields, got " + std::to_string(fields.size()));
            continue;
        }
        const auto ts = parse_timestamp(fields[*ts_col], schema.timestamp_format);
        if (!ts) {
            reject("unparseable timestamp '" + fields[*ts_col] + "'");
            continue;
        }
        if (ts->minute_of_day % schema.base_window_minutes != 0) {
            reject("timestamp '" + fields[*ts_col] + "' is off the " + std::to_string(schema.base_window_minutes) +
                   "-minute grid");
            continue;
        }
        const auto flow = parse_non_negative(fields[*flow_col]);
        if (!flow) {
            reject("invalid flow '" + fields[*flow_col] + "'");
            continue;
        }
        SensorRecord rec;
        rec.timestamp = *ts;
        rec.flow_total = *flow;
        rec.sensor_id = sensor_col && !fields[*sensor_col].empty() ? fields[*sensor_col] : schema.default_sensor_id;
        bool bad_extra = false;
        for (const auto& [name, col] : extra_cols) {
            if (col >= fields.size() || fields[col].empty()) {
                continue;
            }
            const auto v = parse_non_negative(fields[col]);
            if (!v) {
                reject("invalid value '" + fields[col] + "' in column '" + name + "'");
                bad_extra = true;
                break;
            }
            rec.extras.emplace_back(name, *v);
        }
        if (bad_extra) {
            continue;
        }
        if (!seen.emplace(rec.sensor_id, rec.timestamp).second) {
            ++result.duplicates;
            continue;
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

double DaySignal::total() const noexcept
{
    double s = 0.0;
    for (double v : values) {
        s += v;
    }
    return s;
}

DaySignal assemble_day(std::span<const SensorRecord> records, Date date, int base_window_minutes)
{
    if (base_window_minutes <= 0 || kMinutesPerDay % base_window_minutes != 0) {
        throw Error(ErrorCode::InvalidConfig, "base window must divide 1440 minutes");
    }
    check_single_sensor(records);
    const std::size_t slots = slots_per_day(base_window_minutes);
    DaySignal day;
    day.date = date;
    day.base_window_minutes = base_window_minutes;
    day.sensor_id = records.empty() ? std::string{} : records.front().sensor_id;
    day.values.assign(slots, 0.0);
    std::vector<bool> present(slots, false);
    for (const auto& r : records) {
        if (r.timestamp.date != date || r.timestamp.minute_of_day % base_window_minutes != 0) {
            continue;
        }
        const auto slot = static_cast<std::size_t>(r.timestamp.minute_of_day / base_window_minutes);
        if (slot >= slots || present[slot]) {
            continue;
        }
        present[slot] = true;
        day.values[slot] = r.flow_total;
    }
    for (std::size_t i = 0; i < slots; ++i) {
        if (!present[i]) {
            day.filled_slots.push_back(i);
        }
    }
    return day;
}

std::vector<SensorRecord> flatten_day(const DaySignal& day)
{
    std::vector<SensorRecord> out;
    out.reserve(day.values.size() - day.filled_slots.size());
    std::size_t next_fill = 0;
    for (std::size_t i = 0; i < day.values.size(); ++i) {
        if (next_fill < day.filled_slots.size() && day.filled_slots[next_fill] == i) {
            ++next_fill;
            continue;
        }
        SensorRecord r;
        r.timestamp = Timestamp{day.date, static_cast<int>(i) * day.base_window_minutes};
        r.sensor_id = day.sensor_id;
        r.flow_total = day.values[i];
        out.push_back(std::move(r));
    }
    return out;
}

AggregatedSignal aggregate(const DaySignal& day, int level)
{
    const int max_level = max_levels(day.values.size());
    if (level < 1 || level > max_level) {
        throw Error(ErrorCode::LevelOutOfRange,
                    "level " + std::to_string(level) + " outside 1.." + std::to_string(max_level));
    }
    const std::size_t block = std::size_t{1} << level;
    AggregatedSignal out;
    out.level = level;
    out.window_minutes = day.base_window_minutes * static_cast<int>(block);
    out.source_date = day.date;
    out.values.resize(day.values.size() / block);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < block; ++j) {
            s += day.values[i * block + j];
        }
        out.values[i] = s;
    }
    return out;
}

std::string_view to_string(GapSeverity severity) noexcept
{
    switch (severity) {
    case GapSeverity::UpToHour: return "<=1 hour";
    case GapSeverity::UpToDay: return "<=1 day";
    case GapSeverity::UpToWeek: return "<=1 week";
    case GapSeverity::OverWeek: return ">1 week";
    }
    return "?";
}

GapSeverity classify_gap(std::size_t missing_slots, int base_window_minutes)
{
    const auto per_hour = static_cast<std::size_t>(60 / base_window_minutes);
    const std::size_t per_day = slots_per_day(base_window_minutes);
    if (missing_slots <= per_hour) {
        return GapSeverity::UpToHour;
    }
    if (missing_slots <= per_day) {
        return GapSeverity::UpToDay;
    }
    if (missing_slots <= 7 * per_day) {
        return GapSeverity::UpToWeek;
    }
    return GapSeverity::OverWeek;
}

GapReport gap_report(std::span<const SensorRecord> records, Month first, Month last, int base_window_minutes)
{
    check_single_sensor(records);
    const std::size_t slots = slots_per_day(base_window_minutes);
    GapReport report;
    report.sensor_id = records.empty() ? std::string{} : records.front().sensor_id;

    std::map<Month, std::unordered_set<long long>> present;
    for (const auto& r : records) {
        if (r.timestamp.minute_of_day % base_window_minutes != 0) {
            continue;
        }
        const Month m = month_of(r.timestamp.date);
        if (m < first || m > last) {
            continue;
        }
        const long long key = static_cast<long long>(days_since_epoch(r.timestamp.date)) * static_cast<long long>(slots) +
                              r.timestamp.minute_of_day / base_window_minutes;
        present[m].insert(key);
    }
    for (Month m = first; m <= last; m += std::chrono::months{1}) {
        MonthGap g;
        g.month = m;
        g.expected_slots = days_in_month(m) * slots;
        auto it = present.find(m);
        const std::size_t have = it == present.end() ? 0 : it->second.size();
        g.missing_slots = g.expected_slots - have;
        g.severity = classify_gap(g.missing_slots, base_window_minutes);
        report.months.push_back(g);
    }
    return report;
}

void write_gap_report_csv(std::ostream& out, std::span<const GapReport> reports)
{
    out << "sensor_id,month,expected_slots,missing_slots,severity\n";
    for (const auto& r : reports) {
        for (const auto& m : r.months) {
            out << r.sensor_id << ',' << format_month(m.month) << ',' << m.expected_slots << ',' << m.missing_slots
                << ',' << to_string(m.severity) << '\n';
        }
    }
}

std::string gap_report_json(std::span<const GapReport> reports)
{
    nlohmann::ordered_json sensors = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        nlohmann::ordered_json months = nlohmann::ordered_json::array();
        for (const auto& m : r.months) {
            months.push_back({{"month", format_month(m.month)},
                              {"expected_slots", m.expected_slots},
                              {"missing_slots", m.missing_slots},
                              {"severity", std::string(to_string(m.severity))}});
        }
        sensors.push_back({{"sensor_id", r.sensor_id}, {"months", std::move(months)}});
    }
    return nlohmann::ordered_json{{"sensors", std::move(sensors)}}.dump(2) + "\n";
}

void write_day_csv(std::ostream& out, const DaySignal& day, bool full_precision)
{
    out << "timestamp,flow\n";
    for (std::size_t i = 0; i < day.values.size(); ++i) {
        out << format_timestamp({day.date, static_cast<int>(i) * day.base_window_minutes}) << ','
            << format_number(day.values[i], full_precision) << '\n';
    }
}

DaySignal read_day_csv(std::istream& in, std::string sensor_id)
{
    CsvSchema schema;
    schema.flow_column = "flow";
    schema.sensor_column.clear();
    schema.default_sensor_id = std::move(sensor_id);
    auto parsed = parse_sensor_csv(in, schema);
    if (!parsed.rejected.empty()) {
        throw Error(ErrorCode::Io, "day file line " + std::to_string(parsed.rejected.front().line) + ": " +
                                       parsed.rejected.front().reason);
    }
    if (parsed.records.empty()) {
        throw Error(ErrorCode::EmptyInput, "day file has no rows");
    }
    const Date date = parsed.records.front().timestamp.date;
    auto day = assemble_day(parsed.records, date);
    if (day.values.size() != parsed.records.size()) {
        throw Error(ErrorCode::LengthMismatch, "day file must hold exactly one row per slot of one date");
    }
    return day;
}

void write_records_csv(std::ostream& out, std::span<const DaySignal> days, bool full_precision)
{
    out << "timestamp,sensor_id,flow_total\n";
    for (const auto& day : days) {
        for (const auto& r : flatten_day(day)) {
            out << format_timestamp(r.timestamp) << ',' << r.sensor_id << ','
                << format_number(r.flow_total, full_precision) << '\n';
        }
    }
}

} // namespace flowrecon
