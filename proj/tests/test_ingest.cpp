#include "oracles.hpp"
#include "test_util.hpp"

#include "flowrecon/ingest.hpp"

#include <doctest.h>

#include <numeric>
#include <random>
#include <sstream>

using namespace flowrecon;
using namespace std::chrono;

namespace {

const Date kDay = 2012y / March / 13d;

SensorRecord record(Date date, int minute, double flow, std::string sensor = "km51.9")
{
    SensorRecord r;
    r.timestamp = {date, minute};
    r.sensor_id = std::move(sensor);
    r.flow_total = flow;
    return r;
}

std::vector<SensorRecord> full_day(Date date, double flow = 1.0)
{
    std::vector<SensorRecord> out;
    for (int s = 0; s < 288; ++s) {
        out.push_back(record(date, s * 5, flow));
    }
    return out;
}

DaySignal day_of(std::vector<double> values)
{
    DaySignal d;
    d.date = kDay;
    d.sensor_id = "km51.9";
    d.values = std::move(values);
    return d;
}

} // namespace

TEST_CASE("calendar parsing")
{
    CHECK(parse_date("2012-03-13") == kDay);
    CHECK_FALSE(parse_date("2012-02-30"));
    CHECK_FALSE(parse_date("2012-3-13"));
    auto ts = parse_timestamp("2012-03-13T06:05", "%Y-%m-%dT%H:%M");
    REQUIRE(ts);
    CHECK(ts->minute_of_day == 365);
    CHECK(format_timestamp(*ts) == "2012-03-13T06:05");
    CHECK(parse_timestamp("13/03/2012 06:05:00", "%d/%m/%Y %H:%M:%S")->minute_of_day == 365);
    CHECK_FALSE(parse_timestamp("13/03/2012 06:05:30", "%d/%m/%Y %H:%M:%S"));
    CHECK_FALSE(parse_timestamp("2012-03-13T24:00", "%Y-%m-%dT%H:%M"));
    CHECK(weekday_of(kDay) == Tuesday);
    CHECK(parse_weekday("wed") == Wednesday);
    CHECK(parse_weekday("Thursday") == Thursday);
    CHECK(days_in_month(2012y / February) == 29);
}

TEST_CASE("parse_sensor_csv on well-formed input")
{
    std::istringstream in("timestamp,sensor_id,flow_total\n"
                          "2012-03-13T00:00,km51.9,12\n"
                          "2012-03-13T00:05,km51.9,15\n"
                          "2012-03-13T00:10,km51.9,9\n");
    const auto r = parse_sensor_csv(in);
    CHECK(r.records.size() == 3);
    CHECK(r.rejected.empty());
    CHECK(r.duplicates == 0);
    CHECK(r.records[1].flow_total == 15.0);
    CHECK(r.records[2].timestamp.minute_of_day == 10);
}

TEST_CASE("parse_sensor_csv rejects bad rows and counts duplicates")
{
    std::istringstream neg("timestamp,sensor_id,flow_total\n"
                           "2012-03-13T00:00,km51.9,-5\n"
                           "2012-03-13T00:05,km51.9,7\n");
    const auto r = parse_sensor_csv(neg);
    CHECK(r.records.size() == 1);
    CHECK(r.rejected.size() == 1);
    CHECK(r.rejected[0].line == 2);

    std::istringstream dup("timestamp,sensor_id,flow_total\n"
                           "2012-03-13T00:00,km51.9,5\n"
                           "2012-03-13T00:00,km51.9,6\n");
    const auto d = parse_sensor_csv(dup);
    CHECK(d.records.size() == 1);
    CHECK(d.records[0].flow_total == 5.0);
    CHECK(d.duplicates == 1);

    std::istringstream misc("timestamp,sensor_id,flow_total\n"
                            "yesterday,km51.9,5\n"
                            "2012-03-13T00:03,km51.9,5\n"
                            "2012-03-13T00:05,km51.9,abc\n"
                            "2012-03-13T00:10,km51.9\n"
                            "\n"
                            "2012-03-13T00:15,km51.9,4\n");
    const auto m = parse_sensor_csv(misc);
    CHECK(m.records.size() == 1);
    CHECK(m.rejected.size() == 4);
    CHECK(m.rows_read == 5);
}

TEST_CASE("parse_sensor_csv schema mapping")
{
    CsvSchema schema;
    schema.timestamp_column = "data_hora";
    schema.flow_column = "volume_total";
    schema.sensor_column = "";
    schema.default_sensor_id = "SP-280 km 51,9";
    schema.delimiter = ';';
    schema.timestamp_format = "%d/%m/%Y %H:%M";
    schema.optional_columns = {"volume_motos", "velocidade_media"};
    std::istringstream in("data_hora;volume_total;volume_motos;velocidade_media\n"
                          "13/03/2012 07:30;\"210\";4;88.5\n");
    const auto r = parse_sensor_csv(in, schema);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].sensor_id == "SP-280 km 51,9");
    CHECK(r.records[0].timestamp.minute_of_day == 450);
    REQUIRE(r.records[0].extras.size() == 2);
    CHECK(r.records[0].extras[1].second == doctest::Approx(88.5));
}

TEST_CASE("parse_sensor_csv errors")
{
    std::istringstream empty("");
    CHECK(code_of([&] { parse_sensor_csv(empty); }) == ErrorCode::EmptyInput);
    std::istringstream no_flow("timestamp,sensor_id,count\n2012-03-13T00:00,a,1\n");
    CHECK(code_of([&] { parse_sensor_csv(no_flow); }) == ErrorCode::MissingColumn);
    std::istringstream no_ts("time,flow_total\n");
    CHECK(code_of([&] { parse_sensor_csv(no_ts); }) == ErrorCode::MissingColumn);
}

TEST_CASE("assemble_day zero-fills and tracks gaps")
{
    const auto full = assemble_day(full_day(kDay), kDay);
    CHECK(full.values.size() == 288);
    CHECK(full.filled_slots.empty());

    auto recs = full_day(kDay, 3.0);
    recs.erase(recs.begin() + 100);
    const auto gap = assemble_day(recs, kDay);
    CHECK(gap.values[100] == 0.0);
    CHECK(gap.filled_slots == std::vector<std::size_t>{100});

    const auto dead = assemble_day({}, kDay);
    CHECK(dead.total() == 0.0);
    CHECK(dead.filled_slots.size() == 288);

    auto mixed = full_day(kDay);
    mixed.push_back(record(kDay, 0, 1.0, "other"));
    CHECK(code_of([&] { assemble_day(mixed, kDay); }) == ErrorCode::MixedSensors);
}

TEST_CASE("property: assemble, flatten, assemble is idempotent")
{
    std::mt19937_64 rng(5);
    std::bernoulli_distribution keep(0.9);
    std::uniform_int_distribution<int> flow(0, 300);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<SensorRecord> recs;
        for (int s = 0; s < 288; ++s) {
            if (keep(rng)) {
                recs.push_back(record(kDay, s * 5, flow(rng)));
            }
        }
        const auto once = assemble_day(recs, kDay);
        const auto twice = assemble_day(flatten_day(once), kDay);
        CHECK(once.values == twice.values);
        CHECK(once.filled_slots == twice.filled_slots);
        CHECK(once.sensor_id == twice.sensor_id);
    }
}

TEST_CASE("aggregate follows the window ladder")
{
    const auto ones = day_of(std::vector<double>(288, 1.0));
    const auto l1 = aggregate(ones, 1);
    CHECK(l1.window_minutes == 10);
    CHECK(l1.values.size() == 144);
    const auto l4 = aggregate(ones, 4);
    CHECK(l4.window_minutes == 80);
    CHECK(l4.values.size() == 18);
    const auto l2 = aggregate(ones, 2);
    CHECK(l2.values == std::vector<double>(72, 4.0));

    std::vector<double> ramp(288);
    std::iota(ramp.begin(), ramp.end(), 1.0);
    const auto r1 = aggregate(day_of(ramp), 1);
    CHECK(r1.values[0] == 3.0);
    CHECK(r1.values[1] == 7.0);
    CHECK(r1.source_date == kDay);

    CHECK(code_of([&] { aggregate(ones, 0); }) == ErrorCode::LevelOutOfRange);
    CHECK(code_of([&] { aggregate(ones, 6); }) == ErrorCode::LevelOutOfRange);
}

TEST_CASE("property: count conservation and re-aggregation consistency")
{
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> flow(0, 400);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(288);
        for (double& x : v) {
            x = flow(rng);
        }
        const auto day = day_of(v);
        const double total = day.total();
        for (int n = 1; n <= 5; ++n) {
            const auto agg = aggregate(day, n);
            CHECK(std::accumulate(agg.values.begin(), agg.values.end(), 0.0) == total);
            CHECK(agg.values == oracle::block_sums(v, n));
            if (n > 1) {
                const auto prev = aggregate(day, n - 1);
                for (std::size_t i = 0; i < agg.values.size(); ++i) {
                    CHECK(agg.values[i] == prev.values[2 * i] + prev.values[2 * i + 1]);
                }
            }
        }
    }
}

TEST_CASE("gap_report severity classes")
{
    std::vector<SensorRecord> march;
    for (const auto& d : dates_in_month(2012y / March)) {
        auto day = full_day(d);
        march.insert(march.end(), day.begin(), day.end());
    }
    auto r = gap_report(march, 2012y / March, 2012y / March);
    REQUIRE(r.months.size() == 1);
    CHECK(r.months[0].missing_slots == 0);
    CHECK(r.months[0].severity == GapSeverity::UpToHour);

    std::vector<SensorRecord> one_dead;
    for (const auto& rec : march) {
        if (rec.timestamp.date != Date{2012y / March / 20d}) {
            one_dead.push_back(rec);
        }
    }
    r = gap_report(one_dead, 2012y / March, 2012y / March);
    CHECK(r.months[0].missing_slots == 288);
    CHECK(r.months[0].severity == GapSeverity::UpToDay);

    r = gap_report(march, 2012y / March, 2012y / April);
    REQUIRE(r.months.size() == 2);
    CHECK(r.months[1].missing_slots == 8640);
    CHECK(r.months[1].severity == GapSeverity::OverWeek);

    CHECK(classify_gap(12) == GapSeverity::UpToHour);
    CHECK(classify_gap(13) == GapSeverity::UpToDay);
    CHECK(classify_gap(2016) == GapSeverity::UpToWeek);
    CHECK(classify_gap(2017) == GapSeverity::OverWeek);
}

TEST_CASE("gap report serialization")
{
    std::vector<SensorRecord> recs = full_day(kDay);
    const std::vector<GapReport> reports{gap_report(recs, 2012y / March, 2012y / March)};
    std::ostringstream csv;
    write_gap_report_csv(csv, reports);
    CHECK(csv.str() == "sensor_id,month,expected_slots,missing_slots,severity\n"
                       "km51.9,2012-03,8928,8640,>1 week\n");
    const auto json = gap_report_json(reports);
    CHECK(json.find("\"missing_slots\": 8640") != std::string::npos);
}

TEST_CASE("day store file round trip")
{
    std::vector<double> v(288);
    std::iota(v.begin(), v.end(), 0.5);
    const auto day = day_of(v);
    std::stringstream io;
    write_day_csv(io, day);
    const auto back = read_day_csv(io, "km51.9");
    CHECK(back.values == day.values);
    CHECK(back.date == day.date);
}
