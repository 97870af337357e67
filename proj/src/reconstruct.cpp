#include "flowrecon/reconstruct.hpp"
#include "flowrecon/error.hpp"

#include <cmath>
#include <string>

namespace flowrecon {

namespace {

void check_level(int levels, const ReconstructOptions& options)
{
    const int max_level = options.allow_level5 ? 5 : 4;
    if (levels < 1 || levels > max_level) {
        throw Error(ErrorCode::LevelOutOfRange,
                    "reconstruction level " + std::to_string(levels) + " outside 1.." + std::to_string(max_level));
    }
}

} // namespace

DetailBank::DetailBank(std::size_t signal_length, std::vector<std::vector<double>> details, Scenario scenario,
                       std::vector<Date> member_dates)
    : signal_length_(signal_length),
      details_(std::move(details)),
      scenario_(scenario),
      member_dates_(std::move(member_dates))
{
    if (details_.empty()) {
        throw Error(ErrorCode::LengthMismatch, "detail bank needs at least one level");
    }
    if (max_levels(signal_length_) < levels()) {
        throw Error(ErrorCode::NotDyadicallyDivisible, "signal length " + std::to_string(signal_length_) +
                                                           " does not support " + std::to_string(levels()) +
                                                           " levels");
    }
    for (std::size_t j = 0; j < details_.size(); ++j) {
        if (details_[j].size() != signal_length_ >> (j + 1)) {
            throw Error(ErrorCode::LengthMismatch, "D_" + std::to_string(j + 1) + " has " +
                                                       std::to_string(details_[j].size()) + " coefficients");
        }
    }
}

DetailBank DetailBank::zeros(std::size_t signal_length, int levels)
{
    std::vector<std::vector<double>> details;
    for (int j = 1; j <= levels; ++j) {
        details.emplace_back(signal_length >> j, 0.0);
    }
    return DetailBank(signal_length, std::move(details));
}

DetailBank extract_details(const MatrixProfile& matrix, int levels)
{
    const int max_level = max_levels(matrix.values.size());
    if (levels < 1 || levels > max_level) {
        throw Error(ErrorCode::LevelOutOfRange,
                    "level " + std::to_string(levels) + " outside 1.." + std::to_string(max_level));
    }
    auto decomposition = haar_forward(matrix.values, levels);
    // The Matrix approximation is dropped here; only its details are transplanted.
    return DetailBank(matrix.values.size(), std::move(decomposition.details), matrix.scenario, matrix.member_dates);
}

WaveletDecomposition substitute_approximation(const DetailBank& bank, const AggregatedSignal& aggregated,
                                              const ReconstructOptions& options)
{
    if (aggregated.level != bank.levels()) {
        throw Error(ErrorCode::LevelMismatch, "aggregated signal is level " + std::to_string(aggregated.level) +
                                                  ", detail bank is level " + std::to_string(bank.levels()));
    }
    const std::size_t expected = bank.signal_length() >> bank.levels();
    if (aggregated.values.size() != expected) {
        throw Error(ErrorCode::LengthMismatch, "aggregated signal has " + std::to_string(aggregated.values.size()) +
                                                   " windows, expected " + std::to_string(expected));
    }
    WaveletDecomposition out;
    out.approximation = aggregated.values;
    if (options.rescale_approximation) {
        const double scale = std::pow(2.0, -0.5 * bank.levels());
        for (double& a : out.approximation) {
            a *= scale;
        }
    }
    out.details = bank.details();
    if (aggregated.level > 0 && aggregated.window_minutes > 0) {
        out.base_window_minutes = aggregated.window_minutes >> aggregated.level;
    }
    validate(out);
    return out;
}

DaySignal reconstruct_day(const DetailBank& bank, const AggregatedSignal& aggregated,
                          const ReconstructOptions& options)
{
    check_level(bank.levels(), options);
    const auto decomposition = substitute_approximation(bank, aggregated, options);
    DaySignal out;
    out.date = aggregated.source_date;
    out.base_window_minutes = decomposition.base_window_minutes;
    out.values = haar_inverse(decomposition);
    return out;
}

DaySignal reconstruct_day(const MatrixProfile& matrix, const AggregatedSignal& aggregated, int levels,
                          const ReconstructOptions& options)
{
    check_level(levels, options);
    return reconstruct_day(extract_details(matrix, levels), aggregated, options);
}

PercentSignal normalize_percent(std::span<const double> values, Date source_date)
{
    double total = 0.0;
    for (double v : values) {
        total += v;
    }
    if (!(total > 0.0)) {
        throw Error(ErrorCode::ZeroDailyTotal, "daily total is " + std::to_string(total));
    }
    PercentSignal out;
    out.source_date = source_date;
    out.values.reserve(values.size());
    for (double v : values) {
        out.values.push_back(v / total);
    }
    return out;
}

PercentSignal normalize_percent(const DaySignal& day)
{
    return normalize_percent(day.values, day.date);
}

DaySignal staircase_baseline(const AggregatedSignal& aggregated)
{
    if (aggregated.level < 1) {
        throw Error(ErrorCode::LevelOutOfRange, "aggregated level must be >= 1");
    }
    const std::size_t block = std::size_t{1} << aggregated.level;
    DaySignal out;
    out.date = aggregated.source_date;
    out.base_window_minutes = aggregated.window_minutes > 0 ? aggregated.window_minutes / static_cast<int>(block)
                                                            : kBaseWindowMinutes;
    out.values.reserve(aggregated.values.size() * block);
    for (double window : aggregated.values) {
        out.values.insert(out.values.end(), block, window / static_cast<double>(block));
    }
    return out;
}

ClampedCounts clamp_counts(std::span<const double> values)
{
    ClampedCounts out;
    out.values.reserve(values.size());
    for (double v : values) {
        if (v < 0.0) {
            ++out.clamped_slots;
            out.values.push_back(0.0);
        } else {
            out.values.push_back(v);
        }
    }
    return out;
}

} // namespace flowrecon
