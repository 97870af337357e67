#include "oracles.hpp"
#include "test_util.hpp"

#include "flowrecon/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace flowrecon;
using namespace std::chrono;

namespace {

DaySignal day_of(std::vector<double> values)
{
    DaySignal d;
    d.date = 2012y / May / 8d;
    d.values = std::move(values);
    return d;
}

PercentSignal shares(std::vector<double> values)
{
    return PercentSignal{std::move(values), {}};
}

DayResult result(int level, double corr, double err)
{
    DayResult r;
    r.level = level;
    r.correlation = corr;
    r.error_pct = err;
    r.baseline_correlation = corr - 0.01;
    r.baseline_error_pct = err + 1.0;
    return r;
}

} // namespace

TEST_CASE("pearson examples")
{
    const std::vector<double> a{1, 2, 3};
    CHECK(pearson(a, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pearson(a, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));
    const double r = pearson(a, std::vector<double>{1, 2, 4});
    CHECK(r == doctest::Approx(0.9819805060619657).epsilon(1e-14));
    CHECK(r == doctest::Approx(oracle::pearson(a, std::vector<double>{1, 2, 4})).epsilon(1e-14));

    CHECK(code_of([&] { pearson(a, std::vector<double>{5, 5, 5}); }) == ErrorCode::ConstantInput);
    CHECK(code_of([&] { pearson(a, std::vector<double>{1, 2}); }) == ErrorCode::LengthMismatch);
    CHECK(code_of([] { pearson(std::vector<double>{1}, std::vector<double>{1}); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("property: pearson agrees with the textbook formula and is affine invariant")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> scale(0.01, 50.0);
    std::uniform_real_distribution<double> shift(-1e3, 1e3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = oracle::random_signal(rng, 288, 0.0, 100.0);
        const auto b = oracle::random_signal(rng, 288, 0.0, 100.0);
        const double r = pearson(a, b);
        CHECK(std::abs(r - oracle::pearson(a, b)) < 1e-12);
        const double c = scale(rng);
        const double d = shift(rng);
        std::vector<double> t(b);
        for (double& v : t) {
            v = c * v + d;
        }
        CHECK(std::abs(pearson(a, t) - r) < 1e-9);
        CHECK(std::abs(pearson(t, a) - r) < 1e-9);
    }
}

TEST_CASE("mean_abs_pct_error examples")
{
    const auto same = shares({0.5, 0.25, 0.25});
    CHECK(mean_abs_pct_error(same, same).percent == 0.0);

    const auto m = mean_abs_pct_error(shares({0.1, 0.2, 0.7}), shares({0.11, 0.18, 0.7}));
    CHECK(m.percent == doctest::Approx(20.0 / 3.0).epsilon(1e-12));
    const auto two = mean_abs_pct_error(shares({0.1, 0.2}), shares({0.11, 0.18}));
    CHECK(two.percent == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(two.used_slots == 2);

    const auto ex = mean_abs_pct_error(shares({0.0, 0.5, 0.5}), shares({0.2, 0.5, 0.3}));
    CHECK(ex.excluded_slots == 1);
    CHECK(ex.used_slots == 2);
    CHECK(ex.percent == doctest::Approx(20.0).epsilon(1e-12));

    CHECK(code_of([] { mean_abs_pct_error(shares({0.0, 0.0}), shares({0.5, 0.5})); }) == ErrorCode::AllZeroOriginal);
    CHECK(code_of([] { mean_abs_pct_error(shares({1.0}), shares({0.5, 0.5})); }) == ErrorCode::LengthMismatch);

    CHECK(mean_abs_share_difference(shares({0.1, 0.2}), shares({0.11, 0.18})) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("property: the error is zero exactly when positive-share slots agree")
{
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        auto raw = oracle::random_signal(rng, 288, 0.0, 10.0);
        for (std::size_t i = 0; i < 288; i += 7) {
            raw[i] = 0.0;
        }
        const auto orig = normalize_percent(raw);
        auto recon = orig;
        for (std::size_t i = 0; i < 288; i += 7) {
            recon.values[i] = 0.01; // only zero-share slots differ
        }
        CHECK(mean_abs_pct_error(orig, recon).percent == 0.0);
        recon.values[1] *= 1.0001;
        CHECK(mean_abs_pct_error(orig, recon).percent > 0.0);
    }
}

TEST_CASE("evaluate_day self comparisons")
{
    std::mt19937_64 rng(6);
    const auto orig = day_of(oracle::random_signal(rng, 288, 1.0, 100.0));
    const auto base = day_of(oracle::random_signal(rng, 288, 1.0, 100.0));

    const auto self = evaluate_day(orig, orig, base, 2);
    CHECK(self.correlation == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(self.error_pct == 0.0);
    CHECK(self.level == 2);
    CHECK(self.date == orig.date);

    const auto same = evaluate_day(orig, base, base, 3);
    CHECK(same.correlation == same.baseline_correlation);
    CHECK(same.error_pct == same.baseline_error_pct);
    CHECK(same.share_abs_diff == same.baseline_share_abs_diff);

    CHECK(code_of([&] { evaluate_day(day_of(std::vector<double>(288, 0.0)), orig, base, 1); }) ==
          ErrorCode::ZeroDailyTotal);
}

TEST_CASE("describe and summarize")
{
    const auto s = describe(std::vector<double>{4, 1, 3, 2});
    CHECK(s.mean == 2.5);
    CHECK(s.median == 2.0);
    CHECK(s.max == 4.0);
    CHECK(s.min == 1.0);
    CHECK(describe(std::vector<double>{5, 1, 3}).median == 3.0);
    CHECK(code_of([] { describe(std::vector<double>{}); }) == ErrorCode::EmptyResults);

    const std::vector<DayResult> one{result(1, 0.97, 8.0)};
    const auto single = summarize(one);
    REQUIRE(single.size() == 1);
    CHECK(single[0].window_minutes == 10);
    CHECK(single[0].days == 1);
    CHECK(single[0].correlation.mean == single[0].correlation.median);
    CHECK(single[0].correlation.max == single[0].correlation.min);
    CHECK(single[0].error_pct.mean == 8.0);

    CHECK(code_of([] { summarize(std::vector<DayResult>{}); }) == ErrorCode::EmptyResults);
}

TEST_CASE("property: summarize is permutation invariant")
{
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> corr(0.9, 1.0);
    std::uniform_real_distribution<double> err(5.0, 15.0);
    std::vector<DayResult> results;
    for (int i = 0; i < 264; ++i) {
        results.push_back(result(1 + i % 4, corr(rng), err(rng)));
    }
    std::ostringstream ref;
    write_summary_csv_rows(ref, "s", summarize(results), true);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(results.begin(), results.end(), rng);
        std::ostringstream out;
        write_summary_csv_rows(out, "s", summarize(results), true);
        CHECK(out.str() == ref.str());
    }
    const auto sums = summarize(results);
    REQUIRE(sums.size() == 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(sums[k].level == k + 1);
        CHECK(sums[k].days == 66);
        CHECK(sums[k].window_minutes == (5 << (k + 1)));
    }
}

TEST_CASE("summary csv layout")
{
    std::ostringstream out;
    write_summary_csv_header(out);
    const std::vector<DayResult> rs{result(1, 0.983, 7.15), result(4, 0.959, 11.26)};
    write_summary_csv_rows(out, "scenario1", summarize(rs));
    const auto text = out.str();
    CHECK(text.rfind("scenario,resolution,levels,days,", 0) == 0);
    CHECK(text.find("scenario1,10 min,1,1,0.983,0.983,0.983,0.983,7.15,") != std::string::npos);
    CHECK(text.find("scenario1,80 min,4,1,0.959,") != std::string::npos);
}

// Field-data reference means, for orientation only: 0.983 / 7.15% at level 1
// and 0.959 / 11.26% at level 4 with the 5-minute Matrix, 7.06% / 11.31% error
// at levels 1 and 4 with the 20-minute Matrix. The data behind them is not
// available, so nothing asserts them.
