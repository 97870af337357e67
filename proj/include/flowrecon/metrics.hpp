#pragma once

#include "flowrecon/calendar.hpp"
#include "flowrecon/ingest.hpp"
#include "flowrecon/reconstruct.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flowrecon {

// Label attached to the error metric wherever it is reported. The relative
// per-slot error of percent shares is an interpretation of "mean absolute
// error": errors quoted in the 7-11% range only make sense as relative
// errors, since raw share differences are a fraction of a percentage point.
inline constexpr std::string_view kErrorMetricLabel = "MAPE (interpretation)";

// Population Pearson correlation, clamped to [-1, 1].
// Throws LengthMismatch (also for fewer than two samples) and ConstantInput.
double pearson(std::span<const double> a, std::span<const double> b);

struct MapeResult {
    double percent = 0.0;
    std::size_t used_slots = 0;
    std::size_t excluded_slots = 0; // original share == 0
};

// Mean over slots with positive original share of |orig - recon| / orig, in
// percent. Throws LengthMismatch, AllZeroOriginal.
MapeResult mean_abs_pct_error(const PercentSignal& original, const PercentSignal& reconstructed);

// Mean absolute difference of shares, in percentage points.
double mean_abs_share_difference(const PercentSignal& original, const PercentSignal& reconstructed);

struct DayResult {
    Date date{};
    int level = 0;
    double correlation = 0.0;
    double error_pct = 0.0;
    double baseline_correlation = 0.0;
    double baseline_error_pct = 0.0;
    double share_abs_diff = 0.0;
    double baseline_share_abs_diff = 0.0;
    std::size_t excluded_slots = 0;
};

// Both signals are percent-normalized before comparison; the baseline is scored
// the same way. Throws ZeroDailyTotal and LengthMismatch.
DayResult evaluate_day(const DaySignal& original, const DaySignal& reconstructed,
                       const DaySignal& baseline, int level);

struct Stats {
    double mean = 0.0;
    double median = 0.0; // lower-middle element for even counts
    double max = 0.0;
    double min = 0.0;
};

// Throws EmptyResults. Order-independent: the mean is accumulated over sorted
// values so any permutation of the input gives bit-identical output.
Stats describe(std::span<const double> values);

struct LevelSummary {
    int level = 0;
    int window_minutes = 0;
    std::size_t days = 0;
    Stats correlation;
    Stats error_pct;
    Stats baseline_correlation;
    Stats baseline_error_pct;
    Stats share_abs_diff;
};

// One entry per level, ascending. Throws EmptyResults.
std::vector<LevelSummary> summarize(std::span<const DayResult> results,
                                    int base_window_minutes = kBaseWindowMinutes);

// Table layout: resolution, levels, correlation and error statistics,
// then the staircase-baseline columns. The scenario label is the first column.
void write_summary_csv_header(std::ostream& out);
void write_summary_csv_rows(std::ostream& out, std::string_view scenario_label,
                            std::span<const LevelSummary> summaries, bool full_precision = false);

void write_day_results_csv(std::ostream& out, std::span<const DayResult> results,
                           bool full_precision = false);

} // namespace flowrecon
