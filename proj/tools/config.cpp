#include "config.hpp"

#include "flowrecon/error.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace flowrecon::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what)
{
    throw Error(ErrorCode::InvalidConfig, what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object()) {
        bad(where + " must be an object");
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.contains(key)) {
            bad("unknown key '" + key + "' in " + where);
        }
    }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where)
{
    if (!obj.contains(key)) {
        return;
    }
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        bad(where + "." + key + " has the wrong type");
    }
}

Month month_of(const json& v, const std::string& where)
{
    const auto m = v.is_string() ? parse_month(v.get<std::string>()) : std::nullopt;
    if (!m) {
        bad(where + " must be a \"YYYY-MM\" string");
    }
    return *m;
}

Date date_of(const json& v, const std::string& where)
{
    const auto d = v.is_string() ? parse_date(v.get<std::string>()) : std::nullopt;
    if (!d) {
        bad(where + " must be a \"YYYY-MM-DD\" string");
    }
    return *d;
}

std::vector<std::chrono::weekday> weekdays_of(const json& v, const std::string& where)
{
    if (!v.is_array()) {
        bad(where + " must be a list of weekday names");
    }
    std::vector<std::chrono::weekday> out;
    for (const auto& e : v) {
        const auto wd = e.is_string() ? parse_weekday(e.get<std::string>()) : std::nullopt;
        if (!wd) {
            bad(where + " holds an unrecognised weekday");
        }
        out.push_back(*wd);
    }
    return out;
}

std::vector<Date> dates_of(const json& v, const std::string& where)
{
    if (!v.is_array()) {
        bad(where + " must be a list of dates");
    }
    std::vector<Date> out;
    for (const auto& e : v) {
        out.push_back(date_of(e, where));
    }
    return out;
}

std::vector<std::filesystem::path> paths_of(const json& v, const std::string& where)
{
    std::vector<std::string> raw;
    try {
        raw = v.get<std::vector<std::string>>();
    } catch (const json::exception&) {
        bad(where + " must be a list of paths");
    }
    return {raw.begin(), raw.end()};
}

void read_synth(const json& j, SynthConfig& s)
{
    check_keys(j, "synth",
               {"daily_total", "peaks", "noise_std", "integer_counts", "sensor_id", "jitter", "matrix_month",
                "first_target_month", "target_months", "weekdays", "seed"});
    read(j, "daily_total", s.params.daily_total, "synth");
    read(j, "noise_std", s.params.noise_std, "synth");
    read(j, "integer_counts", s.params.integer_counts, "synth");
    read(j, "sensor_id", s.params.sensor_id, "synth");
    read(j, "target_months", s.target_months, "synth");
    read(j, "seed", s.params.seed, "synth");
    if (j.contains("peaks")) {
        if (!j["peaks"].is_array()) {
            bad("synth.peaks must be a list");
        }
        s.params.peaks.clear();
        for (const auto& p : j["peaks"]) {
            check_keys(p, "synth.peaks[]", {"center_slot", "width_slots", "weight"});
            Peak peak;
            read(p, "center_slot", peak.center_slot, "synth.peaks[]");
            read(p, "width_slots", peak.width_slots, "synth.peaks[]");
            read(p, "weight", peak.weight, "synth.peaks[]");
            s.params.peaks.push_back(peak);
        }
    }
    if (j.contains("jitter")) {
        check_keys(j["jitter"], "synth.jitter", {"center_slots", "weight_fraction"});
        read(j["jitter"], "center_slots", s.jitter.center_slots, "synth.jitter");
        read(j["jitter"], "weight_fraction", s.jitter.weight_fraction, "synth.jitter");
    }
    if (j.contains("matrix_month")) {
        s.matrix_month = month_of(j["matrix_month"], "synth.matrix_month");
    }
    if (j.contains("first_target_month")) {
        s.first_target_month = month_of(j["first_target_month"], "synth.first_target_month");
    }
    if (j.contains("weekdays")) {
        s.weekdays = weekdays_of(j["weekdays"], "synth.weekdays");
    }
}

void read_ingest(const json& j, IngestConfig& c)
{
    check_keys(j, "ingest", {"inputs", "schema", "first_month", "last_month"});
    if (j.contains("inputs")) {
        c.inputs = paths_of(j["inputs"], "ingest.inputs");
    }
    if (j.contains("first_month")) {
        c.first_month = month_of(j["first_month"], "ingest.first_month");
    }
    if (j.contains("last_month")) {
        c.last_month = month_of(j["last_month"], "ingest.last_month");
    }
    if (j.contains("schema")) {
        const auto& s = j["schema"];
        check_keys(s, "ingest.schema",
                   {"timestamp_column", "flow_column", "sensor_column", "default_sensor_id", "optional_columns",
                    "delimiter", "timestamp_format"});
        read(s, "timestamp_column", c.schema.timestamp_column, "ingest.schema");
        read(s, "flow_column", c.schema.flow_column, "ingest.schema");
        read(s, "sensor_column", c.schema.sensor_column, "ingest.schema");
        read(s, "default_sensor_id", c.schema.default_sensor_id, "ingest.schema");
        read(s, "optional_columns", c.schema.optional_columns, "ingest.schema");
        read(s, "timestamp_format", c.schema.timestamp_format, "ingest.schema");
        std::string delim(1, c.schema.delimiter);
        read(s, "delimiter", delim, "ingest.schema");
        if (delim.size() != 1) {
            bad("ingest.schema.delimiter must be a single character");
        }
        c.schema.delimiter = delim[0];
    }
}

void read_matrix(const json& j, MatrixConfig& c)
{
    check_keys(j, "matrix", {"month", "weekdays", "excluded_dates", "sensor"});
    if (j.contains("month")) {
        c.month = month_of(j["month"], "matrix.month");
    }
    if (j.contains("weekdays")) {
        c.weekdays = weekdays_of(j["weekdays"], "matrix.weekdays");
    }
    if (j.contains("excluded_dates")) {
        c.excluded_dates = dates_of(j["excluded_dates"], "matrix.excluded_dates");
    }
    read(j, "sensor", c.sensor, "matrix");
}

json weekday_names(const std::vector<std::chrono::weekday>& wds)
{
    json out = json::array();
    for (const auto& wd : wds) {
        out.push_back(format_weekday(wd));
    }
    return out;
}

json date_names(const std::vector<Date>& dates)
{
    json out = json::array();
    for (const auto& d : dates) {
        out.push_back(format_date(d));
    }
    return out;
}

json path_names(const std::vector<std::filesystem::path>& paths)
{
    json out = json::array();
    for (const auto& p : paths) {
        out.push_back(p.generic_string());
    }
    return out;
}

} // namespace

RunConfig config_from_json(const json& j)
{
    check_keys(j, "config",
               {"out", "scenario", "levels", "seed", "rescale_approximation", "full_precision", "jobs", "synth",
                "ingest", "matrix", "reconstruct", "report"});
    RunConfig c;
    std::string out = c.out.string();
    read(j, "out", out, "config");
    c.out = out;
    read(j, "scenario", c.scenario, "config");
    read(j, "levels", c.levels, "config");
    read(j, "rescale_approximation", c.rescale_approximation, "config");
    read(j, "full_precision", c.full_precision, "config");
    read(j, "jobs", c.jobs, "config");
    if (j.contains("synth")) {
        read_synth(j["synth"], c.synth);
    }
    read(j, "seed", c.synth.params.seed, "config");
    if (j.contains("ingest")) {
        read_ingest(j["ingest"], c.ingest);
    }
    if (j.contains("matrix")) {
        read_matrix(j["matrix"], c.matrix);
    }
    if (j.contains("reconstruct")) {
        const auto& r = j["reconstruct"];
        check_keys(r, "reconstruct", {"dates", "allow_level5"});
        if (r.contains("dates")) {
            c.reconstruct.dates = dates_of(r["dates"], "reconstruct.dates");
        }
        read(r, "allow_level5", c.reconstruct.allow_level5, "reconstruct");
    }
    if (j.contains("report")) {
        check_keys(j["report"], "report", {"results"});
        if (j["report"].contains("results")) {
            c.report.results = paths_of(j["report"]["results"], "report.results");
        }
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open config " + path.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        bad(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void validate(const RunConfig& c)
{
    if (c.scenario != 1 && c.scenario != 2) {
        bad("scenario must be 1 or 2");
    }
    if (c.levels.empty()) {
        bad("levels must not be empty");
    }
    const int top = c.reconstruct.allow_level5 ? 5 : 4;
    for (int k : c.levels) {
        if (k < 1 || k > top) {
            bad("level " + std::to_string(k) + " outside 1.." + std::to_string(top));
        }
    }
    auto sorted = c.levels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        bad("levels must not repeat");
    }
    if (c.jobs < 1) {
        bad("jobs must be at least 1");
    }
    if (c.synth.target_months < 0) {
        bad("synth.target_months must be non-negative");
    }
    if (c.matrix.weekdays.empty()) {
        bad("matrix.weekdays must not be empty");
    }
    try {
        flowrecon::validate(c.synth.params);
    } catch (const Error& e) {
        bad(std::string("synth: ") + e.what());
    }
}

nlohmann::ordered_json to_json(const RunConfig& c)
{
    nlohmann::ordered_json j;
    j["out"] = c.out.generic_string();
    j["scenario"] = c.scenario;
    j["levels"] = c.levels;
    j["rescale_approximation"] = c.rescale_approximation;
    j["full_precision"] = c.full_precision;
    j["jobs"] = c.jobs;

    auto& s = j["synth"];
    s["seed"] = c.synth.params.seed;
    s["daily_total"] = c.synth.params.daily_total;
    s["noise_std"] = c.synth.params.noise_std;
    s["integer_counts"] = c.synth.params.integer_counts;
    s["sensor_id"] = c.synth.params.sensor_id;
    s["peaks"] = nlohmann::ordered_json::array();
    for (const auto& p : c.synth.params.peaks) {
        s["peaks"].push_back({{"center_slot", p.center_slot}, {"width_slots", p.width_slots}, {"weight", p.weight}});
    }
    s["jitter"] = {{"center_slots", c.synth.jitter.center_slots}, {"weight_fraction", c.synth.jitter.weight_fraction}};
    s["matrix_month"] = format_month(c.synth.matrix_month);
    s["first_target_month"] = format_month(c.synth.first_target_month);
    s["target_months"] = c.synth.target_months;
    s["weekdays"] = weekday_names(c.synth.weekdays);

    auto& in = j["ingest"];
    in["inputs"] = path_names(c.ingest.inputs);
    const auto& sc = c.ingest.schema;
    in["schema"] = {{"timestamp_column", sc.timestamp_column},   {"flow_column", sc.flow_column},
                    {"sensor_column", sc.sensor_column},         {"default_sensor_id", sc.default_sensor_id},
                    {"optional_columns", sc.optional_columns},   {"delimiter", std::string(1, sc.delimiter)},
                    {"timestamp_format", sc.timestamp_format}};
    if (c.ingest.first_month) {
        in["first_month"] = format_month(*c.ingest.first_month);
    }
    if (c.ingest.last_month) {
        in["last_month"] = format_month(*c.ingest.last_month);
    }

    auto& m = j["matrix"];
    if (c.matrix.month) {
        m["month"] = format_month(*c.matrix.month);
    }
    m["weekdays"] = weekday_names(c.matrix.weekdays);
    m["excluded_dates"] = date_names(c.matrix.excluded_dates);
    m["sensor"] = c.matrix.sensor;

    j["reconstruct"] = {{"dates", date_names(c.reconstruct.dates)}, {"allow_level5", c.reconstruct.allow_level5}};
    j["report"] = {{"results", path_names(c.report.results)}};
    return j;
}

} // namespace flowrecon::cli
