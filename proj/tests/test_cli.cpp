#include "test_util.hpp"

#include "commands.hpp"
#include "config.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace flowrecon;
using namespace flowrecon::cli;
using namespace std::chrono;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto p = fs::current_path() / "cli_scratch" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t line_count(const fs::path& p)
{
    const auto text = slurp(p);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

RunConfig small_run(const fs::path& out, int target_months = 2)
{
    RunConfig c;
    c.out = out;
    c.synth.target_months = target_months;
    return c;
}

int run_all(const RunConfig& c)
{
    std::ostringstream log;
    for (auto cmd : {cmd_synth, cmd_ingest, cmd_matrix, cmd_reconstruct, cmd_report}) {
        if (const int rc = cmd(c, log); rc != kExitOk) {
            return rc;
        }
    }
    return kExitOk;
}

int run_binary(const std::string& args, const fs::path& stderr_file)
{
    const std::string cmd =
        std::string("\"") + FLOWRECON_CLI_PATH + "\" " + args + " > /dev/null 2> \"" + stderr_file.string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("synth then ingest reproduces the generated days")
{
    auto c = small_run(scratch("roundtrip"));
    std::ostringstream log;
    REQUIRE(cmd_synth(c, log) == kExitOk);
    REQUIRE(cmd_ingest(c, log) == kExitOk);

    const auto corpus = generate_experiment_corpus(c.synth.params, c.synth.jitter, c.synth.matrix_month,
                                                   c.synth.first_target_month, c.synth.target_months,
                                                   c.synth.weekdays);
    for (const auto* group : {&corpus.matrix_days, &corpus.target_days}) {
        for (const auto& d : *group) {
            std::ifstream in(c.out / "days" / c.synth.params.sensor_id / (format_date(d.date) + ".csv"));
            REQUIRE(in);
            const auto back = read_day_csv(in, c.synth.params.sensor_id);
            CHECK(back.values == d.values);
        }
    }
    const auto index = nlohmann::json::parse(slurp(c.out / "days/index.json"));
    CHECK(index["days"].size() == 13 + 6);
    CHECK(index["inputs"][0]["rejected"] == 0);
}

TEST_CASE("ingest reports a missing column with its code and file")
{
    const auto dir = scratch("missing");
    std::ofstream(dir / "bad.csv") << "timestamp,sensor_id,count\n2012-03-13T00:00,a,1\n";
    auto c = small_run(dir);
    c.ingest.inputs = {dir / "bad.csv"};
    std::ostringstream log;
    try {
        cmd_ingest(c, log);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingColumn);
        CHECK(std::string(e.what()).find("bad.csv") != std::string::npos);
    }

    const int rc = run_binary("ingest --out \"" + dir.string() + "\" --input \"" + (dir / "bad.csv").string() + "\"",
                              dir / "stderr.txt");
    CHECK(rc == kExitError);
    CHECK(slurp(dir / "stderr.txt").find("MissingColumn") != std::string::npos);
}

TEST_CASE("a dead day shows up as 288 missing slots")
{
    const auto dir = scratch("deadday");
    std::ofstream csv(dir / "march.csv");
    csv << "timestamp,sensor_id,flow_total\n";
    for (const auto& d : dates_in_month(2012y / March)) {
        if (d == Date{2012y / March / 20d}) {
            continue;
        }
        for (int s = 0; s < 288; ++s) {
            csv << format_timestamp({d, s * 5}) << ",km51.9," << (10 + s % 7) << '\n';
        }
    }
    csv.close();
    auto c = small_run(dir);
    c.ingest.inputs = {dir / "march.csv"};
    std::ostringstream log;
    REQUIRE(cmd_ingest(c, log) == kExitOk);
    CHECK(slurp(dir / "gap_report.csv") ==
          "sensor_id,month,expected_slots,missing_slots,severity\nkm51.9,2012-03,8928,288,<=1 day\n");
}

TEST_CASE("full synthetic run yields 66 x 4 results and 288 plot rows per day and level")
{
    auto c = small_run(scratch("full"), 22);
    c.jobs = 3;
    REQUIRE(run_all(c) == kExitOk);
    const auto dr = nlohmann::json::parse(slurp(c.out / "results_s1/day_results.json"));
    CHECK(dr["results"].size() == 264);
    CHECK(line_count(c.out / "report/plot_data.csv") == 1 + 264 * 288);
    const auto manifest = nlohmann::json::parse(slurp(c.out / "results_s1/manifest.json"));
    CHECK(manifest["inputs"].size() == 66);
    CHECK(manifest["matrix"]["member_dates"].size() == 13);
    CHECK(manifest["failures"].empty());
    CHECK(manifest["config"]["synth"]["seed"] == c.synth.params.seed);
    CHECK(manifest["matrix"]["sha256"].get<std::string>().size() == 64);
}

TEST_CASE("worker count does not change the outputs")
{
    auto a = small_run(scratch("jobs1"));
    auto b = a;
    b.out = scratch("jobs4");
    b.jobs = 4;
    REQUIRE(run_all(a) == kExitOk);
    REQUIRE(run_all(b) == kExitOk);
    CHECK(slurp(a.out / "report/summary.csv") == slurp(b.out / "report/summary.csv"));
    CHECK(slurp(a.out / "results_s1/day_results.json") == slurp(b.out / "results_s1/day_results.json"));
}

TEST_CASE("a one-day run summarizes to mean = median = max = min")
{
    auto c = small_run(scratch("oneday"));
    c.reconstruct.dates = {2012y / April / 4d};
    c.levels = {2};
    REQUIRE(run_all(c) == kExitOk);
    const auto s = nlohmann::json::parse(slurp(c.out / "report/summary.json"));
    const auto& corr = s["blocks"][0]["levels"][0]["correlation"];
    CHECK(corr["mean"] == corr["median"]);
    CHECK(corr["max"] == corr["min"]);
    CHECK(corr["mean"] == corr["max"]);
    CHECK(s["error_metric"] == "MAPE (interpretation)");
}

TEST_CASE("a constant matrix makes the reconstruction track the staircase")
{
    const auto dir = scratch("constant");
    std::ofstream csv(dir / "in.csv");
    csv << "timestamp,sensor_id,flow_total\n";
    for (const auto& d : dates_in_month(2012y / March)) {
        for (int s = 0; s < 288; ++s) {
            const bool target = d == Date{2012y / March / 13d};
            csv << format_timestamp({d, s * 5}) << ",k," << (target ? 5 + (s * 37) % 23 : 40) << '\n';
        }
    }
    csv.close();
    auto c = small_run(dir);
    c.ingest.inputs = {dir / "in.csv"};
    c.matrix.excluded_dates = {2012y / March / 13d};
    c.reconstruct.dates = {2012y / March / 13d};
    REQUIRE(run_all(c) == kExitOk);
    const auto dr = nlohmann::json::parse(slurp(dir / "results_s1/day_results.json"));
    for (const auto& r : dr["results"]) {
        CHECK(r["correlation"].get<double>() == doctest::Approx(r["baseline_correlation"].get<double>()).epsilon(1e-9));
    }
}

TEST_CASE("per-day failures are recorded and give a nonzero exit")
{
    auto c = small_run(scratch("failure"));
    c.reconstruct.dates = {2012y / April / 4d, 2030y / January / 1d};
    std::ostringstream log;
    REQUIRE(cmd_synth(c, log) == kExitOk);
    REQUIRE(cmd_ingest(c, log) == kExitOk);
    REQUIRE(cmd_matrix(c, log) == kExitOk);
    CHECK(cmd_reconstruct(c, log) == kExitPartial);
    const auto manifest = nlohmann::json::parse(slurp(c.out / "results_s1/manifest.json"));
    CHECK(manifest["failures"].size() == 1);
    CHECK(manifest["result_count"] == 4);
}

TEST_CASE("config file with flag overrides")
{
    const auto dir = scratch("config");
    std::ofstream(dir / "run.json") << R"({"scenario": 2, "levels": [1, 3], "seed": 7, "synth": {"noise_std": 0.05}})";
    auto c = load_config(dir / "run.json");
    CHECK(c.scenario == 2);
    CHECK(c.levels == std::vector<int>{1, 3});
    CHECK(c.synth.params.seed == 7);
    CHECK(c.synth.params.noise_std == 0.05);

    std::ofstream(dir / "typo.json") << R"({"scenaro": 2})";
    CHECK(code_of([&] { load_config(dir / "typo.json"); }) == ErrorCode::InvalidConfig);
    std::ofstream(dir / "broken.json") << "{";
    CHECK(code_of([&] { load_config(dir / "broken.json"); }) == ErrorCode::InvalidConfig);

    c.levels = {};
    CHECK(code_of([&] { validate(c); }) == ErrorCode::InvalidConfig);
    c.levels = {5};
    CHECK(code_of([&] { validate(c); }) == ErrorCode::InvalidConfig);
    c.reconstruct.allow_level5 = true;
    CHECK_NOTHROW(validate(c));

    CHECK(config_from_json(nlohmann::json::parse(to_json(small_run(dir)).dump())).out == dir);

    const int rc = run_binary("synth --config \"" + (dir / "run.json").string() + "\" --seed 9 --out \"" +
                                  (dir / "out").string() + "\"",
                              dir / "stderr.txt");
    REQUIRE(rc == kExitOk);
    const auto manifest = nlohmann::json::parse(slurp(dir / "out/synth_manifest.json"));
    CHECK(manifest["config"]["synth"]["seed"] == 9);
    CHECK(manifest["config"]["scenario"] == 2);

    CHECK(run_binary("reconstruct --scenario 3", dir / "stderr.txt") != kExitOk);
}

TEST_CASE("six significant digits unless full precision")
{
    auto c = small_run(scratch("digits"));
    c.reconstruct.dates = {2012y / April / 4d};
    c.levels = {1};
    REQUIRE(run_all(c) == kExitOk);
    const auto short_row = slurp(c.out / "report/summary.csv");
    c.full_precision = true;
    std::ostringstream log;
    REQUIRE(cmd_report(c, log) == kExitOk);
    const auto long_row = slurp(c.out / "report/summary.csv");
    CHECK(long_row.size() > short_row.size());
    CHECK(short_row.find("0.99") != std::string::npos);
}
