#include "flowrecon/synth.hpp"
#include "flowrecon/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace flowrecon {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::vector<double> mixture(std::span<const Peak> peaks, double daily_total, std::size_t slots)
{
    double floor_weight = 1.0;
    for (const auto& p : peaks) {
        floor_weight -= p.weight;
    }
    floor_weight = std::max(floor_weight, 0.0);
    std::vector<double> profile(slots, floor_weight / static_cast<double>(slots));
    std::vector<double> bump(slots);
    for (const auto& p : peaks) {
        double mass = 0.0;
        for (std::size_t s = 0; s < slots; ++s) {
            const double z = (static_cast<double>(s) - p.center_slot) / p.width_slots;
            bump[s] = std::exp(-0.5 * z * z);
            mass += bump[s];
        }
        for (std::size_t s = 0; s < slots; ++s) {
            profile[s] += p.weight * bump[s] / mass;
        }
    }
    for (double& v : profile) {
        v *= daily_total;
    }
    return profile;
}

} // namespace

void validate(const ProfileParams& params)
{
    if (!(params.daily_total > 0.0) || !std::isfinite(params.daily_total)) {
        throw Error(ErrorCode::InvalidParams, "daily_total must be a positive finite number");
    }
    if (!(params.noise_std >= 0.0) || !std::isfinite(params.noise_std)) {
        throw Error(ErrorCode::InvalidParams, "noise_std must be non-negative");
    }
    double weights = 0.0;
    for (const auto& p : params.peaks) {
        if (!(p.weight >= 0.0) || !(p.width_slots > 0.0) || !(p.center_slot >= 0.0) ||
            !(p.center_slot < static_cast<double>(kSlotsPerDay))) {
            throw Error(ErrorCode::InvalidParams, "peak needs weight >= 0, width > 0 and center in [0, 288)");
        }
        weights += p.weight;
    }
    if (weights > 1.0 + 1e-12) {
        throw Error(ErrorCode::InvalidParams, "peak weights sum to more than 1");
    }
}

DayRng::DayRng(std::uint64_t seed, Date date)
    : engine_(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(days_since_epoch(date)))))
{
}

double DayRng::uniform()
{
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double DayRng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::vector<double> base_profile(const ProfileParams& params)
{
    validate(params);
    return mixture(params.peaks, params.daily_total, kSlotsPerDay);
}

DaySignal generate_day(const ProfileParams& params, Date date, const DayJitter& jitter)
{
    validate(params);
    if (!(jitter.center_slots >= 0.0) || !(jitter.weight_fraction >= 0.0)) {
        throw Error(ErrorCode::InvalidParams, "jitter magnitudes must be non-negative");
    }
    DayRng rng(params.seed, date);

    std::vector<Peak> peaks = params.peaks;
    if (jitter.center_slots > 0.0 || jitter.weight_fraction > 0.0) {
        double weights = 0.0;
        for (auto& p : peaks) {
            p.center_slot += jitter.center_slots * rng.normal();
            p.center_slot = std::clamp(p.center_slot, 0.0, static_cast<double>(kSlotsPerDay) - 1.0);
            p.weight *= std::max(0.0, 1.0 + jitter.weight_fraction * rng.normal());
            weights += p.weight;
        }
        if (weights > 1.0) {
            for (auto& p : peaks) {
                p.weight /= weights;
            }
        }
    }

    DaySignal day;
    day.date = date;
    day.sensor_id = params.sensor_id;
    day.values = mixture(peaks, params.daily_total, kSlotsPerDay);
    if (params.noise_std > 0.0) {
        for (double& v : day.values) {
            v = std::max(0.0, v * (1.0 + params.noise_std * rng.normal()));
        }
    }
    if (params.integer_counts) {
        for (double& v : day.values) {
            v = std::nearbyint(v);
        }
    }
    return day;
}

std::vector<DaySignal> generate_corpus(const ProfileParams& params, Month month,
                                       const std::vector<std::chrono::weekday>& weekdays, const DayJitter& jitter)
{
    validate(params);
    if (!month.ok()) {
        throw Error(ErrorCode::InvalidParams, "invalid month");
    }
    std::vector<DaySignal> out;
    for (const auto& date : dates_in_month(month)) {
        if (std::find(weekdays.begin(), weekdays.end(), weekday_of(date)) != weekdays.end()) {
            out.push_back(generate_day(params, date, jitter));
        }
    }
    return out;
}

std::vector<Date> first_full_week(Month month, const std::vector<std::chrono::weekday>& weekdays)
{
    if (weekdays.empty()) {
        return {};
    }
    std::vector<Date> week;
    std::chrono::sys_days week_start{};
    for (const auto& date : dates_in_month(month)) {
        const std::chrono::sys_days day{date};
        const auto start = day - (weekday_of(date) - std::chrono::Monday);
        if (start != week_start) {
            if (week.size() == weekdays.size()) {
                return week;
            }
            week.clear();
            week_start = start;
        }
        if (std::find(weekdays.begin(), weekdays.end(), weekday_of(date)) != weekdays.end()) {
            week.push_back(date);
        }
    }
    return week.size() == weekdays.size() ? week : std::vector<Date>{};
}

ExperimentCorpus generate_experiment_corpus(const ProfileParams& params, const DayJitter& jitter, Month matrix_month,
                                            Month first_target_month, int target_months,
                                            const std::vector<std::chrono::weekday>& weekdays)
{
    if (target_months < 0) {
        throw Error(ErrorCode::InvalidParams, "target_months must be non-negative");
    }
    ExperimentCorpus out;
    out.matrix_days = generate_corpus(params, matrix_month, weekdays, jitter);
    Month m = first_target_month;
    for (int i = 0; i < target_months; ++i, m += std::chrono::months{1}) {
        for (const auto& date : first_full_week(m, weekdays)) {
            out.target_days.push_back(generate_day(params, date, jitter));
        }
    }
    return out;
}

} // namespace flowrecon
