#include "flowrecon/metrics.hpp"
#include "flowrecon/error.hpp"
#include "flowrecon/format.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace flowrecon {

double pearson(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size() || a.size() < 2) {
        throw Error(ErrorCode::LengthMismatch, "pearson needs two equal-length vectors of at least 2 samples, got " +
                                                   std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
    auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    };
    if (constant(a) || constant(b)) {
        throw Error(ErrorCode::ConstantInput, "pearson is undefined for a constant vector");
    }
    const double n = static_cast<double>(a.size());
    double mean_a = 0.0;
    double mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;
    double cov = 0.0;
    double var_a = 0.0;
    double var_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    const double r = cov / std::sqrt(var_a * var_b);
    return std::clamp(r, -1.0, 1.0);
}

MapeResult mean_abs_pct_error(const PercentSignal& original, const PercentSignal& reconstructed)
{
    if (original.values.size() != reconstructed.values.size()) {
        throw Error(ErrorCode::LengthMismatch, "original has " + std::to_string(original.values.size()) +
                                                   " slots, reconstruction has " +
                                                   std::to_string(reconstructed.values.size()));
    }
    MapeResult out;
    double sum = 0.0;
    for (std::size_t i = 0; i < original.values.size(); ++i) {
        const double o = original.values[i];
        if (!(o > 0.0)) {
            ++out.excluded_slots;
            continue;
        }
        sum += std::abs(o - reconstructed.values[i]) / o;
        ++out.used_slots;
    }
    if (out.used_slots == 0) {
        throw Error(ErrorCode::AllZeroOriginal, "no slot with positive original share");
    }
    out.percent = 100.0 * sum / static_cast<double>(out.used_slots);
    return out;
}

double mean_abs_share_difference(const PercentSignal& original, const PercentSignal& reconstructed)
{
    if (original.values.size() != reconstructed.values.size() || original.values.empty()) {
        throw Error(ErrorCode::LengthMismatch, "share vectors differ in length");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < original.values.size(); ++i) {
        sum += std::abs(original.values[i] - reconstructed.values[i]);
    }
    return 100.0 * sum / static_cast<double>(original.values.size());
}

DayResult evaluate_day(const DaySignal& original, const DaySignal& reconstructed, const DaySignal& baseline,
                       int level)
{
    const auto orig = normalize_percent(original);
    const auto recon = normalize_percent(reconstructed);
    const auto base = normalize_percent(baseline);
    DayResult r;
    r.date = original.date;
    r.level = level;
    r.correlation = pearson(orig.values, recon.values);
    const auto err = mean_abs_pct_error(orig, recon);
    r.error_pct = err.percent;
    r.excluded_slots = err.excluded_slots;
    r.baseline_correlation = pearson(orig.values, base.values);
    r.baseline_error_pct = mean_abs_pct_error(orig, base).percent;
    r.share_abs_diff = mean_abs_share_difference(orig, recon);
    r.baseline_share_abs_diff = mean_abs_share_difference(orig, base);
    return r;
}

Stats describe(std::span<const double> values)
{
    if (values.empty()) {
        throw Error(ErrorCode::EmptyResults, "no values to summarize");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : sorted) {
        sum += v;
    }
    Stats s;
    s.mean = sum / static_cast<double>(sorted.size());
    s.median = sorted[(sorted.size() - 1) / 2];
    s.min = sorted.front();
    s.max = sorted.back();
    return s;
}

std::vector<LevelSummary> summarize(std::span<const DayResult> results, int base_window_minutes)
{
    if (results.empty()) {
        throw Error(ErrorCode::EmptyResults, "no day results to summarize");
    }
    struct Columns {
        std::vector<double> corr, err, base_corr, base_err, share;
    };
    std::map<int, Columns> by_level;
    for (const auto& r : results) {
        auto& c = by_level[r.level];
        c.corr.push_back(r.correlation);
        c.err.push_back(r.error_pct);
        c.base_corr.push_back(r.baseline_correlation);
        c.base_err.push_back(r.baseline_error_pct);
        c.share.push_back(r.share_abs_diff);
    }
    std::vector<LevelSummary> out;
    for (const auto& [level, c] : by_level) {
        LevelSummary s;
        s.level = level;
        s.window_minutes = base_window_minutes << level;
        s.days = c.corr.size();
        s.correlation = describe(c.corr);
        s.error_pct = describe(c.err);
        s.baseline_correlation = describe(c.base_corr);
        s.baseline_error_pct = describe(c.base_err);
        s.share_abs_diff = describe(c.share);
        out.push_back(s);
    }
    return out;
}

namespace {

void write_stats(std::ostream& out, const Stats& s, bool full)
{
    out << ',' << format_number(s.mean, full) << ',' << format_number(s.median, full) << ','
        << format_number(s.max, full) << ',' << format_number(s.min, full);
}

} // namespace

void write_summary_csv_header(std::ostream& out)
{
    out << "scenario,resolution,levels,days"
           ",correlation_mean,correlation_median,correlation_max,correlation_min"
           ",mape_interp_pct_mean,mape_interp_pct_median,mape_interp_pct_max,mape_interp_pct_min"
           ",baseline_correlation_mean,baseline_correlation_median,baseline_correlation_max,baseline_correlation_min"
           ",baseline_mape_interp_pct_mean,baseline_mape_interp_pct_median,baseline_mape_interp_pct_max"
           ",baseline_mape_interp_pct_min"
           ",share_abs_diff_pp_mean\n";
}

void write_summary_csv_rows(std::ostream& out, std::string_view scenario_label,
                            std::span<const LevelSummary> summaries, bool full_precision)
{
    for (const auto& s : summaries) {
        out << scenario_label << ',' << s.window_minutes << " min," << s.level << ',' << s.days;
        write_stats(out, s.correlation, full_precision);
        write_stats(out, s.error_pct, full_precision);
        write_stats(out, s.baseline_correlation, full_precision);
        write_stats(out, s.baseline_error_pct, full_precision);
        out << ',' << format_number(s.share_abs_diff.mean, full_precision) << '\n';
    }
}

void write_day_results_csv(std::ostream& out, std::span<const DayResult> results, bool full_precision)
{
    out << "date,level,correlation,mape_interp_pct,baseline_correlation,baseline_mape_interp_pct"
           ",share_abs_diff_pp,baseline_share_abs_diff_pp,excluded_slots\n";
    for (const auto& r : results) {
        out << format_date(r.date) << ',' << r.level << ',' << format_number(r.correlation, full_precision) << ','
            << format_number(r.error_pct, full_precision) << ','
            << format_number(r.baseline_correlation, full_precision) << ','
            << format_number(r.baseline_error_pct, full_precision) << ','
            << format_number(r.share_abs_diff, full_precision) << ','
            << format_number(r.baseline_share_abs_diff, full_precision) << ',' << r.excluded_slots << '\n';
    }
}

} // namespace flowrecon
