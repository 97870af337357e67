#pragma once

#include "flowrecon/calendar.hpp"
#include "flowrecon/ingest.hpp"

#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace flowrecon {

struct Peak {
    double center_slot = 0.0;
    double width_slots = 1.0; // Gaussian standard deviation
    double weight = 0.0;      // share of daily_total carried by this bump
};

/// Gaussian bumps on a uniform floor. The floor carries 1 - sum(weights) of
/// the daily total. Defaults give a weekday commuter shape.
struct ProfileParams {
    double daily_total = 24000.0;
    std::vector<Peak> peaks{
        {90.0, 9.0, 0.16},   // 07:30
        {150.0, 50.0, 0.42}, // daytime plateau
        {216.0, 12.0, 0.24}, // 18:00
    };
    double noise_std = 0.10; // multiplicative, fraction of the slot value
    std::uint64_t seed = 20120313;
    bool integer_counts = false;
    std::string sensor_id = "synthetic";
};

struct DayJitter {
    double center_slots = 0.0;    // std-dev of per-day peak center shift
    double weight_fraction = 0.0; // std-dev of relative per-day weight change
};

// Day-to-day variation used by the shipped experiment.
inline constexpr DayJitter kCommuterJitter{2.0, 0.08};

// Throws InvalidParams.
void validate(const ProfileParams& params);

// mt19937_64 stream keyed by (seed, date). Gaussian draws use Box-Muller on
// 53-bit uniforms, so streams are reproducible on any conforming platform.
class DayRng {
public:
    DayRng(std::uint64_t seed, Date date);
    double uniform(); // (0, 1)
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Noiseless shape scaled to params.daily_total.
std::vector<double> base_profile(const ProfileParams& params);

// Jitter, when given, is drawn first from the same (seed, date) stream.
DaySignal generate_day(const ProfileParams& params, Date date, const DayJitter& jitter = {});

// One day per date of month whose weekday is in weekdays.
std::vector<DaySignal> generate_corpus(const ProfileParams& params, Month month,
                                       const std::vector<std::chrono::weekday>& weekdays,
                                       const DayJitter& jitter = {});

// Dates of the first Monday-based week of month in which every weekday of
// weekdays falls inside the month. Empty if no such week exists.
std::vector<Date> first_full_week(Month month, const std::vector<std::chrono::weekday>& weekdays);

struct ExperimentCorpus {
    std::vector<DaySignal> matrix_days;
    std::vector<DaySignal> target_days;
};

// Every matching day of matrix_month, plus one week per month for
// target_months consecutive months starting at first_target_month.
ExperimentCorpus generate_experiment_corpus(const ProfileParams& params, const DayJitter& jitter, Month matrix_month,
                                            Month first_target_month, int target_months,
                                            const std::vector<std::chrono::weekday>& weekdays);

} // namespace flowrecon
