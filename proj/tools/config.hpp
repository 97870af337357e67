#pragma once

#include "flowrecon/ingest.hpp"
#include "flowrecon/matrix.hpp"
#include "flowrecon/synth.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace flowrecon::cli {

struct SynthConfig {
    ProfileParams params = [] {
        ProfileParams p;
        p.integer_counts = true; // keeps the corpus.csv -> ingest round trip exact
        return p;
    }();
    DayJitter jitter = kCommuterJitter;
    Month matrix_month{std::chrono::year{2012}, std::chrono::March};
    Month first_target_month{std::chrono::year{2012}, std::chrono::April};
    int target_months = 22;
    std::vector<std::chrono::weekday> weekdays{std::chrono::Tuesday, std::chrono::Wednesday, std::chrono::Thursday};
};

struct IngestConfig {
    std::vector<std::filesystem::path> inputs; // empty: <out>/corpus.csv
    CsvSchema schema;
    std::optional<Month> first_month;
    std::optional<Month> last_month;
};

struct MatrixConfig {
    std::optional<Month> month; // empty: earliest month in the day store
    std::vector<std::chrono::weekday> weekdays{std::chrono::Tuesday, std::chrono::Wednesday, std::chrono::Thursday};
    std::vector<Date> excluded_dates;
    std::string sensor; // empty: the store must hold exactly one sensor
};

struct ReconstructConfig {
    std::vector<Date> dates; // empty: every fault-free, non-Matrix day with an allowed weekday
    bool allow_level5 = false;
};

struct ReportConfig {
    std::vector<std::filesystem::path> results; // empty: every <out>/results_s* present
};

struct RunConfig {
    std::filesystem::path out = "run";
    int scenario = 1;
    std::vector<int> levels{1, 2, 3, 4};
    bool rescale_approximation = false;
    bool full_precision = false;
    int jobs = 1;
    SynthConfig synth;
    IngestConfig ingest;
    MatrixConfig matrix;
    ReconstructConfig reconstruct;
    ReportConfig report;

    Scenario scenario_enum() const { return static_cast<Scenario>(scenario); }
};

// Unknown keys are rejected so typos do not silently fall back to defaults.
// Throws InvalidConfig (malformed file or values) and Io (unreadable file).
RunConfig load_config(const std::filesystem::path& path);
RunConfig config_from_json(const nlohmann::json& j);

// Throws InvalidConfig.
void validate(const RunConfig& config);

// Everything needed to re-run, in the same layout load_config accepts.
nlohmann::ordered_json to_json(const RunConfig& config);

} // namespace flowrecon::cli
