#include "commands.hpp"

#include "flowrecon/error.hpp"
#include "flowrecon/format.hpp"
#include "flowrecon/metrics.hpp"
#include "flowrecon/reconstruct.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

namespace flowrecon::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
}

// Re-raise with the file name in front, keeping the original code.
[[noreturn]] void rethrow_in(const fs::path& path, const Error& e)
{
    std::string msg = e.what();
    if (const auto colon = msg.find(": "); colon != std::string::npos) {
        msg = msg.substr(colon + 2);
    }
    throw Error(e.code(), path.string() + ": " + msg);
}

std::string safe_name(std::string_view id)
{
    std::string out;
    for (char c : id) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' ||
                        c == '-' || c == '_';
        out += ok ? c : '_';
    }
    return out.empty() ? "_" : out;
}

double report_value(double v, bool full_precision)
{
    return full_precision ? v : round_significant(v);
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index is touched by
// exactly one thread, so callers write into preallocated slots.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn fn)
{
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                fn(i);
            }
        });
    }
}

fs::path days_dir(const RunConfig& c)
{
    return c.out / "days";
}

fs::path matrix_path(const RunConfig& c, std::string_view ext)
{
    return c.out / ("matrix_s" + std::to_string(c.scenario) + "." + std::string(ext));
}

fs::path results_dir(const RunConfig& c)
{
    return c.out / ("results_s" + std::to_string(c.scenario));
}

struct StoredDay {
    DaySignal day;
    fs::path file; // relative to days/
    std::string sha256;
};

// Day store entries for one sensor, ordered by date.
struct DayStore {
    std::string sensor_id;
    std::vector<StoredDay> days;
};

DayStore load_store(const RunConfig& c)
{
    const auto dir = days_dir(c);
    const auto index_path = dir / "index.json";
    nlohmann::json index;
    try {
        index = nlohmann::json::parse(read_file(index_path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, index_path.string() + ": " + e.what());
    }

    std::set<std::string> sensors;
    for (const auto& e : index.at("days")) {
        sensors.insert(e.at("sensor_id").get<std::string>());
    }
    DayStore store;
    if (!c.matrix.sensor.empty()) {
        if (!sensors.contains(c.matrix.sensor)) {
            throw Error(ErrorCode::InvalidConfig, "sensor '" + c.matrix.sensor + "' is not in the day store");
        }
        store.sensor_id = c.matrix.sensor;
    } else if (sensors.size() == 1) {
        store.sensor_id = *sensors.begin();
    } else {
        throw Error(ErrorCode::InvalidConfig,
                    "day store holds " + std::to_string(sensors.size()) + " sensors; set matrix.sensor");
    }

    for (const auto& e : index.at("days")) {
        if (e.at("sensor_id").get<std::string>() != store.sensor_id) {
            continue;
        }
        StoredDay sd;
        sd.file = e.at("file").get<std::string>();
        const auto path = dir / sd.file;
        const std::string text = read_file(path);
        std::istringstream in(text);
        try {
            sd.day = read_day_csv(in, store.sensor_id);
        } catch (const Error& err) {
            rethrow_in(path, err);
        }
        sd.day.filled_slots = e.at("filled_slots").get<std::vector<std::size_t>>();
        sd.sha256 = e.at("sha256").get<std::string>();
        store.days.push_back(std::move(sd));
    }
    std::sort(store.days.begin(), store.days.end(),
              [](const StoredDay& a, const StoredDay& b) { return a.day.date < b.day.date; });
    return store;
}

DaySelectionCriteria matrix_criteria(const RunConfig& c, const DayStore& store)
{
    DaySelectionCriteria crit;
    crit.allowed_weekdays = c.matrix.weekdays;
    crit.excluded_dates = c.matrix.excluded_dates;
    if (c.matrix.month) {
        crit.month = *c.matrix.month;
    } else if (!store.days.empty()) {
        const Date first = store.days.front().day.date;
        crit.month = first.year() / first.month();
    } else {
        throw Error(ErrorCode::EmptyInput, "day store is empty");
    }
    return crit;
}

ojson stats_json(const Stats& s, bool full)
{
    return {{"mean", report_value(s.mean, full)},
            {"median", report_value(s.median, full)},
            {"max", report_value(s.max, full)},
            {"min", report_value(s.min, full)}};
}

} // namespace

std::string sha256_file(const fs::path& path)
{
    const std::string bytes = read_file(path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
        throw Error(ErrorCode::Io, "SHA-256 failed for " + path.string());
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex += kHex[digest[i] >> 4];
        hex += kHex[digest[i] & 0xF];
    }
    return hex;
}

int cmd_synth(const RunConfig& c, std::ostream& log)
{
    const auto& s = c.synth;
    const auto corpus =
        generate_experiment_corpus(s.params, s.jitter, s.matrix_month, s.first_target_month, s.target_months, s.weekdays);

    std::map<Date, const DaySignal*> by_date;
    for (const auto* group : {&corpus.matrix_days, &corpus.target_days}) {
        for (const auto& d : *group) {
            by_date.emplace(d.date, &d);
        }
    }
    std::vector<DaySignal> days;
    for (const auto& [date, d] : by_date) {
        days.push_back(*d);
    }

    std::ostringstream csv;
    write_records_csv(csv, days, true);
    const auto corpus_path = c.out / "corpus.csv";
    write_file(corpus_path, csv.str());

    ojson manifest;
    manifest["command"] = "synth";
    manifest["config"] = to_json(c);
    manifest["corpus"] = {{"file", "corpus.csv"}, {"sha256", sha256_file(corpus_path)}, {"days", days.size()}};
    auto dates = [](const std::vector<DaySignal>& v) {
        ojson out = ojson::array();
        for (const auto& d : v) {
            out.push_back(format_date(d.date));
        }
        return out;
    };
    manifest["matrix_days"] = dates(corpus.matrix_days);
    manifest["target_days"] = dates(corpus.target_days);
    write_file(c.out / "synth_manifest.json", manifest.dump(2) + "\n");

    log << "synth: " << corpus.matrix_days.size() << " matrix-month days, " << corpus.target_days.size()
        << " target days -> " << corpus_path.string() << '\n';
    return kExitOk;
}

int cmd_ingest(const RunConfig& c, std::ostream& log)
{
    auto inputs = c.ingest.inputs;
    if (inputs.empty()) {
        inputs.push_back(c.out / "corpus.csv");
    }

    ojson input_log = ojson::array();
    std::ostringstream rejects;
    rejects << "file,line,reason\n";
    // sensor -> date -> records
    std::map<std::string, std::map<Date, std::vector<SensorRecord>>> grouped;
    std::set<std::pair<std::string, Timestamp>> seen;
    std::size_t cross_file_duplicates = 0;

    for (const auto& path : inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw Error(ErrorCode::Io, "cannot open input " + path.string());
        }
        ParseResult parsed;
        try {
            parsed = parse_sensor_csv(in, c.ingest.schema);
        } catch (const Error& e) {
            rethrow_in(path, e);
        }
        for (const auto& r : parsed.rejected) {
            rejects << path.generic_string() << ',' << r.line << ',' << r.reason << '\n';
        }
        for (auto& r : parsed.records) {
            if (!seen.emplace(r.sensor_id, r.timestamp).second) {
                ++cross_file_duplicates;
                continue;
            }
            grouped[r.sensor_id][r.timestamp.date].push_back(std::move(r));
        }
        input_log.push_back({{"file", path.generic_string()},
                             {"sha256", sha256_file(path)},
                             {"rows_read", parsed.rows_read},
                             {"records", parsed.records.size()},
                             {"duplicates", parsed.duplicates},
                             {"rejected", parsed.rejected.size()}});
    }

    const auto dir = days_dir(c);
    ojson day_entries = ojson::array();
    std::vector<GapReport> gaps;
    std::size_t day_count = 0;
    for (const auto& [sensor, by_date] : grouped) {
        std::vector<SensorRecord> all;
        for (const auto& [date, recs] : by_date) {
            const auto day = assemble_day(recs, date, c.ingest.schema.base_window_minutes);
            const fs::path rel = fs::path(safe_name(sensor)) / (format_date(date) + ".csv");
            std::ostringstream out;
            write_day_csv(out, day, true);
            write_file(dir / rel, out.str());
            day_entries.push_back({{"sensor_id", sensor},
                                   {"date", format_date(date)},
                                   {"file", rel.generic_string()},
                                   {"total", day.total()},
                                   {"filled_slots", day.filled_slots},
                                   {"sha256", sha256_file(dir / rel)}});
            all.insert(all.end(), recs.begin(), recs.end());
            ++day_count;
        }
        const Date first = by_date.begin()->first;
        const Date last = by_date.rbegin()->first;
        gaps.push_back(gap_report(all, c.ingest.first_month.value_or(first.year() / first.month()),
                                  c.ingest.last_month.value_or(last.year() / last.month()),
                                  c.ingest.schema.base_window_minutes));
    }

    ojson index;
    index["base_window_minutes"] = c.ingest.schema.base_window_minutes;
    index["inputs"] = std::move(input_log);
    index["cross_file_duplicates"] = cross_file_duplicates;
    index["days"] = std::move(day_entries);
    write_file(dir / "index.json", index.dump(2) + "\n");

    std::ostringstream gap_csv;
    write_gap_report_csv(gap_csv, gaps);
    write_file(c.out / "gap_report.csv", gap_csv.str());
    write_file(c.out / "gap_report.json", gap_report_json(gaps));
    write_file(c.out / "ingest_log.csv", rejects.str());

    log << "ingest: " << day_count << " days from " << grouped.size() << " sensor(s) -> " << dir.string() << '\n';
    return kExitOk;
}

int cmd_matrix(const RunConfig& c, std::ostream& log)
{
    const auto store = load_store(c);
    std::vector<DaySignal> calendar;
    for (const auto& sd : store.days) {
        calendar.push_back(sd.day);
    }
    const auto crit = matrix_criteria(c, store);
    const auto dates = select_typical_days(calendar, crit);
    std::vector<DaySignal> members;
    for (const auto& d : calendar) {
        if (std::binary_search(dates.begin(), dates.end(), d.date)) {
            members.push_back(d);
        }
    }
    const auto matrix = build_matrix(members, c.scenario_enum());

    std::ostringstream csv;
    write_matrix_csv(csv, matrix, c.full_precision);
    write_file(matrix_path(c, "csv"), csv.str());
    write_file(matrix_path(c, "json"), matrix_json(matrix));

    log << "matrix: " << to_string(matrix.scenario) << " from " << members.size() << " days of "
        << format_month(crit.month) << " -> " << matrix_path(c, "json").string() << '\n';
    return kExitOk;
}

int cmd_reconstruct(const RunConfig& c, std::ostream& log)
{
    const auto store = load_store(c);
    const auto mpath = matrix_path(c, "json");
    const auto matrix = matrix_from_json(read_file(mpath));
    if (matrix.scenario != c.scenario_enum()) {
        throw Error(ErrorCode::InvalidConfig, mpath.string() + " was built for another scenario");
    }

    ojson failures = ojson::array();
    std::vector<const StoredDay*> targets;
    if (!c.reconstruct.dates.empty()) {
        for (const auto& date : c.reconstruct.dates) {
            auto it = std::find_if(store.days.begin(), store.days.end(),
                                   [&](const StoredDay& sd) { return sd.day.date == date; });
            if (it == store.days.end()) {
                failures.push_back({{"date", format_date(date)}, {"level", nullptr}, {"error", "not in day store"}});
            } else {
                targets.push_back(&*it);
            }
        }
    } else {
        const auto& wds = c.matrix.weekdays;
        for (const auto& sd : store.days) {
            const bool member = std::binary_search(matrix.member_dates.begin(), matrix.member_dates.end(), sd.day.date);
            const bool weekday = std::find(wds.begin(), wds.end(), weekday_of(sd.day.date)) != wds.end();
            if (!member && weekday && sd.day.fault_free()) {
                targets.push_back(&sd);
            }
        }
    }

    ReconstructOptions opts;
    opts.rescale_approximation = c.rescale_approximation;
    opts.allow_level5 = c.reconstruct.allow_level5;
    auto levels = c.levels;
    std::sort(levels.begin(), levels.end());
    std::vector<DetailBank> banks;
    for (int k : levels) {
        banks.push_back(extract_details(matrix, k));
    }

    struct Item {
        const StoredDay* target = nullptr;
        std::size_t bank = 0;
        std::optional<DayResult> result;
        std::string csv;
        std::size_t clamped = 0;
        std::string error;
    };
    std::vector<Item> items;
    for (const auto* t : targets) {
        for (std::size_t b = 0; b < banks.size(); ++b) {
            items.push_back({t, b, std::nullopt, {}, 0, {}});
        }
    }

    const bool full = c.full_precision;
    parallel_for(items.size(), c.jobs, [&](std::size_t i) {
        Item& item = items[i];
        const DaySignal& day = item.target->day;
        const DetailBank& bank = banks[item.bank];
        try {
            const auto agg = aggregate(day, bank.levels());
            const auto rec = reconstruct_day(bank, agg, opts);
            const auto base = staircase_baseline(agg);
            item.result = evaluate_day(day, rec, base, bank.levels());

            const auto orig_share = normalize_percent(day);
            const auto rec_share = normalize_percent(rec);
            const auto base_share = normalize_percent(base);
            std::vector<double> counts(rec_share.values);
            const double total = day.total();
            for (double& v : counts) {
                v *= total;
            }
            const auto clamped = clamp_counts(counts);
            item.clamped = clamped.clamped_slots;

            std::ostringstream out;
            out << "timestamp,original_count,original_share,reconstructed_share,reconstructed_count,baseline_share\n";
            for (std::size_t s = 0; s < day.values.size(); ++s) {
                const Timestamp ts{day.date, static_cast<int>(s) * day.base_window_minutes};
                out << format_timestamp(ts) << ',' << format_number(day.values[s], full) << ','
                    << format_number(orig_share.values[s], full) << ',' << format_number(rec_share.values[s], full)
                    << ',' << format_number(clamped.values[s], full) << ','
                    << format_number(base_share.values[s], full) << '\n';
            }
            item.csv = out.str();
        } catch (const Error& e) {
            item.result.reset();
            item.error = e.what();
        }
    });

    const auto rdir = results_dir(c);
    fs::remove_all(rdir / "days");
    std::vector<DayResult> results;
    ojson result_json = ojson::array();
    ojson clamp_json = ojson::array();
    std::size_t clamped_total = 0;
    for (const auto& item : items) {
        const auto date = format_date(item.target->day.date);
        const int level = banks[item.bank].levels();
        if (!item.result) {
            failures.push_back({{"date", date}, {"level", level}, {"error", item.error}});
            continue;
        }
        const std::string rel = "days/" + date + "_L" + std::to_string(level) + ".csv";
        write_file(rdir / rel, item.csv);
        const auto& r = *item.result;
        results.push_back(r);
        // Full precision regardless of --full-precision: report reads these back.
        result_json.push_back({{"date", date},
                               {"level", level},
                               {"file", rel},
                               {"correlation", r.correlation},
                               {"error_pct", r.error_pct},
                               {"baseline_correlation", r.baseline_correlation},
                               {"baseline_error_pct", r.baseline_error_pct},
                               {"share_abs_diff", r.share_abs_diff},
                               {"baseline_share_abs_diff", r.baseline_share_abs_diff},
                               {"excluded_slots", r.excluded_slots}});
        if (item.clamped > 0) {
            clamp_json.push_back({{"date", date}, {"level", level}, {"slots", item.clamped}});
            clamped_total += item.clamped;
        }
    }

    std::ostringstream csv;
    write_day_results_csv(csv, results, full);
    write_file(rdir / "day_results.csv", csv.str());
    ojson dr;
    dr["scenario"] = to_string(c.scenario_enum());
    dr["error_metric"] = kErrorMetricLabel;
    dr["results"] = std::move(result_json);
    write_file(rdir / "day_results.json", dr.dump(2) + "\n");

    ojson manifest;
    manifest["command"] = "reconstruct";
    manifest["config"] = to_json(c);
    manifest["scenario"] = to_string(c.scenario_enum());
    manifest["levels"] = levels;
    manifest["sensor_id"] = store.sensor_id;
    ojson members = ojson::array();
    for (const auto& d : matrix.member_dates) {
        members.push_back(format_date(d));
    }
    manifest["matrix"] = {{"file", mpath.filename().string()},
                          {"sha256", sha256_file(mpath)},
                          {"member_dates", std::move(members)}};
    ojson inputs = ojson::array();
    for (const auto* t : targets) {
        inputs.push_back({{"date", format_date(t->day.date)},
                          {"file", (fs::path("days") / t->file).generic_string()},
                          {"sha256", t->sha256}});
    }
    manifest["inputs"] = std::move(inputs);
    manifest["result_count"] = results.size();
    manifest["clamped_slots_total"] = clamped_total;
    manifest["clamped"] = std::move(clamp_json);
    manifest["failures"] = failures;
    write_file(rdir / "manifest.json", manifest.dump(2) + "\n");

    log << "reconstruct: " << to_string(c.scenario_enum()) << ", " << targets.size() << " days x " << levels.size()
        << " levels -> " << results.size() << " results";
    if (!failures.empty()) {
        log << ", " << failures.size() << " failed";
    }
    log << '\n';
    return failures.empty() ? kExitOk : kExitPartial;
}

int cmd_report(const RunConfig& c, std::ostream& log)
{
    auto dirs = c.report.results;
    if (dirs.empty()) {
        for (int s : {1, 2}) {
            const auto d = c.out / ("results_s" + std::to_string(s));
            if (fs::exists(d / "day_results.json")) {
                dirs.push_back(d);
            }
        }
    }
    if (dirs.empty()) {
        throw Error(ErrorCode::EmptyResults, "no results directories under " + c.out.string());
    }

    const bool full = c.full_precision;
    std::ostringstream summary_csv;
    write_summary_csv_header(summary_csv);
    std::ostringstream plot;
    plot << "scenario,date,level,timestamp,original_share,reconstructed_share,baseline_share\n";
    ojson blocks = ojson::array();

    for (const auto& dir : dirs) {
        const auto path = dir / "day_results.json";
        nlohmann::json dr;
        try {
            dr = nlohmann::json::parse(read_file(path));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
        }
        const auto label = dr.at("scenario").get<std::string>();
        std::vector<DayResult> results;
        for (const auto& e : dr.at("results")) {
            DayResult r;
            const auto date = parse_date(e.at("date").get<std::string>());
            if (!date) {
                throw Error(ErrorCode::InvalidConfig, path.string() + ": bad date");
            }
            r.date = *date;
            r.level = e.at("level").get<int>();
            r.correlation = e.at("correlation").get<double>();
            r.error_pct = e.at("error_pct").get<double>();
            r.baseline_correlation = e.at("baseline_correlation").get<double>();
            r.baseline_error_pct = e.at("baseline_error_pct").get<double>();
            r.share_abs_diff = e.at("share_abs_diff").get<double>();
            r.baseline_share_abs_diff = e.at("baseline_share_abs_diff").get<double>();
            r.excluded_slots = e.at("excluded_slots").get<std::size_t>();
            results.push_back(r);

            std::istringstream day_csv(read_file(dir / e.at("file").get<std::string>()));
            std::string line;
            std::getline(day_csv, line); // header
            while (std::getline(day_csv, line)) {
                std::vector<std::string> f;
                std::istringstream row(line);
                for (std::string cell; std::getline(row, cell, ',');) {
                    f.push_back(cell);
                }
                if (f.size() != 6) {
                    throw Error(ErrorCode::InvalidConfig, "malformed row in " + e.at("file").get<std::string>());
                }
                plot << label << ',' << format_date(r.date) << ',' << r.level << ',' << f[0] << ',' << f[2] << ','
                     << f[3] << ',' << f[5] << '\n';
            }
        }

        const auto summaries = summarize(results);
        write_summary_csv_rows(summary_csv, label, summaries, full);
        ojson levels = ojson::array();
        for (const auto& s : summaries) {
            levels.push_back({{"resolution", std::to_string(s.window_minutes) + " min"},
                              {"level", s.level},
                              {"days", s.days},
                              {"correlation", stats_json(s.correlation, full)},
                              {"mape_interp_pct", stats_json(s.error_pct, full)},
                              {"baseline_correlation", stats_json(s.baseline_correlation, full)},
                              {"baseline_mape_interp_pct", stats_json(s.baseline_error_pct, full)},
                              {"share_abs_diff_pp_mean", report_value(s.share_abs_diff.mean, full)}});
        }
        blocks.push_back({{"scenario", label}, {"results_dir", dir.generic_string()}, {"levels", std::move(levels)}});
    }

    const auto rdir = c.out / "report";
    write_file(rdir / "summary.csv", summary_csv.str());
    ojson summary;
    summary["error_metric"] = kErrorMetricLabel;
    summary["blocks"] = std::move(blocks);
    write_file(rdir / "summary.json", summary.dump(2) + "\n");
    write_file(rdir / "plot_data.csv", plot.str());

    log << "report: " << dirs.size() << " scenario block(s) -> " << (rdir / "summary.csv").string() << '\n';
    return kExitOk;
}

} // namespace flowrecon::cli
