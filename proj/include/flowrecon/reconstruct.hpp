#pragma once

#include "flowrecon/ingest.hpp"
#include "flowrecon/matrix.hpp"
#include "flowrecon/wavelet.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace flowrecon {

/// Detail coefficients D_1..D_k taken from a Matrix decomposition. The same
/// bank is reused for every target day, so it is immutable once built.
class DetailBank {
public:
    // Throws LengthMismatch unless details follow the dyadic ladder for
    // signal_length.
    DetailBank(std::size_t signal_length, std::vector<std::vector<double>> details,
               Scenario scenario = Scenario::FiveMinuteMean, std::vector<Date> member_dates = {});

    static DetailBank zeros(std::size_t signal_length, int levels);

    int levels() const noexcept { return static_cast<int>(details_.size()); }
    std::size_t signal_length() const noexcept { return signal_length_; }
    const std::vector<std::vector<double>>& details() const noexcept { return details_; }
    const std::vector<double>& detail(int level) const { return details_.at(level - 1); }
    Scenario scenario() const noexcept { return scenario_; }
    const std::vector<Date>& member_dates() const noexcept { return member_dates_; }

private:
    std::size_t signal_length_;
    std::vector<std::vector<double>> details_;
    Scenario scenario_;
    std::vector<Date> member_dates_;
};

struct ReconstructOptions {
    // Divide the inserted counts by 2^(k/2) so they become orthonormal
    // approximation coefficients. Off reproduces the raw-count substitution,
    // whose scale distortion is removed later by percent normalization.
    bool rescale_approximation = false;
    bool allow_level5 = false;
};

// Throws LevelOutOfRange unless 1 <= levels <= max_levels(|matrix|).
DetailBank extract_details(const MatrixProfile& matrix, int levels);

// Approximation := aggregated counts (optionally rescaled), details := bank.
// Throws LevelMismatch when aggregated.level != bank.levels(), LengthMismatch when
// the aggregated vector does not have signal_length / 2^k entries.
WaveletDecomposition substitute_approximation(const DetailBank& bank,
                                              const AggregatedSignal& aggregated,
                                              const ReconstructOptions& options = {});

// Inverse transform of the substituted decomposition. Raw output may contain
// negative slots; see clamp_counts. Throws LevelOutOfRange for levels outside
// 1..4 (1..5 with allow_level5).
DaySignal reconstruct_day(const DetailBank& bank, const AggregatedSignal& aggregated,
                          const ReconstructOptions& options = {});
DaySignal reconstruct_day(const MatrixProfile& matrix, const AggregatedSignal& aggregated, int levels,
                          const ReconstructOptions& options = {});

struct PercentSignal {
    std::vector<double> values;
    Date source_date{};
};

// Each slot as its share of the daily total. Throws ZeroDailyTotal when the
// total is not positive.
PercentSignal normalize_percent(const DaySignal& day);
PercentSignal normalize_percent(std::span<const double> values, Date source_date = {});

// Every 2^n block takes its window count / 2^n.
DaySignal staircase_baseline(const AggregatedSignal& aggregated);

struct ClampedCounts {
    std::vector<double> values;
    std::size_t clamped_slots = 0;
};

// Vehicle-count export path: negative slots are set to zero and counted.
ClampedCounts clamp_counts(std::span<const double> values);

} // namespace flowrecon
