#include "flowrecon/error.hpp"
#include "flowrecon/metrics.hpp"
#include "flowrecon/reconstruct.hpp"
#include "flowrecon/synth.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

namespace py = pybind11;
using namespace flowrecon;

namespace {

using Vec = std::vector<double>;

py::array_t<double> to_array(const Vec& v)
{
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::list to_arrays(const std::vector<Vec>& vs)
{
    py::list out;
    for (const auto& v : vs) {
        out.append(to_array(v));
    }
    return out;
}

DaySignal day_of(Vec values)
{
    DaySignal d;
    d.values = std::move(values);
    return d;
}

AggregatedSignal aggregated_of(Vec values, int level)
{
    AggregatedSignal a;
    a.level = level;
    a.window_minutes = kBaseWindowMinutes << level;
    a.values = std::move(values);
    return a;
}

MatrixProfile matrix_of(Vec values, int scenario)
{
    if (scenario != 1 && scenario != 2) {
        throw Error(ErrorCode::InvalidParams, "scenario must be 1 or 2");
    }
    MatrixProfile m;
    m.values = std::move(values);
    m.scenario = static_cast<Scenario>(scenario);
    return m;
}

Date date_arg(const std::string& text)
{
    const auto d = parse_date(text);
    if (!d) {
        throw Error(ErrorCode::InvalidParams, "date must be YYYY-MM-DD");
    }
    return *d;
}

} // namespace

PYBIND11_MODULE(_flowrecon, m)
{
    m.doc() = "Haar-wavelet reconstruction of 5-minute traffic flow from aggregated counts";

    // The module attribute keeps the type alive; the translator only borrows it.
    static PyObject* error_type = py::exception<Error>(m, "FlowreconError", PyExc_ValueError).ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error_type, exc.ptr());
        }
    });

    m.def(
        "haar_forward",
        [](Vec x, int levels) {
            const auto w = haar_forward(x, levels);
            py::dict out;
            out["approximation"] = to_array(w.approximation);
            out["details"] = to_arrays(w.details);
            return out;
        },
        py::arg("signal"), py::arg("levels"), "Orthonormal Haar analysis. details[0] is the finest level.");

    m.def(
        "haar_inverse",
        [](Vec approximation, std::vector<Vec> details) {
            WaveletDecomposition w;
            w.approximation = std::move(approximation);
            w.details = std::move(details);
            return to_array(haar_inverse(w));
        },
        py::arg("approximation"), py::arg("details"));

    m.def("max_levels", &max_levels, py::arg("n"));

    m.def(
        "aggregate", [](Vec day, int level) { return to_array(aggregate(day_of(std::move(day)), level).values); },
        py::arg("day"), py::arg("level"), "Block sums over 2^level slots.");

    m.def(
        "build_matrix",
        [](std::vector<Vec> days, int scenario) {
            std::vector<DaySignal> ds;
            for (auto& d : days) {
                ds.push_back(day_of(std::move(d)));
            }
            return to_array(build_matrix(ds, matrix_of({}, scenario).scenario).values);
        },
        py::arg("days"), py::arg("scenario") = 1);

    m.def(
        "extract_details",
        [](Vec matrix, int levels) { return to_arrays(extract_details(matrix_of(std::move(matrix), 1), levels).details()); },
        py::arg("matrix"), py::arg("levels"));

    m.def(
        "reconstruct_day",
        [](Vec matrix, Vec aggregated, int levels, bool rescale, bool allow_level5) {
            ReconstructOptions opts;
            opts.rescale_approximation = rescale;
            opts.allow_level5 = allow_level5;
            return to_array(
                reconstruct_day(matrix_of(std::move(matrix), 1), aggregated_of(std::move(aggregated), levels), levels, opts)
                    .values);
        },
        py::arg("matrix"), py::arg("aggregated"), py::arg("levels"), py::arg("rescale_approximation") = false,
        py::arg("allow_level5") = false);

    m.def(
        "staircase_baseline",
        [](Vec aggregated, int level) {
            return to_array(staircase_baseline(aggregated_of(std::move(aggregated), level)).values);
        },
        py::arg("aggregated"), py::arg("level"));

    m.def(
        "normalize_percent", [](Vec values) { return to_array(normalize_percent(values).values); },
        py::arg("values"));

    m.def(
        "pearson", [](Vec a, Vec b) { return pearson(a, b); }, py::arg("a"), py::arg("b"));

    m.def(
        "mean_abs_pct_error",
        [](Vec original, Vec reconstructed) {
            const auto r = mean_abs_pct_error(PercentSignal{std::move(original), {}},
                                              PercentSignal{std::move(reconstructed), {}});
            py::dict out;
            out["percent"] = r.percent;
            out["used_slots"] = r.used_slots;
            out["excluded_slots"] = r.excluded_slots;
            return out;
        },
        py::arg("original_share"), py::arg("reconstructed_share"));

    m.def(
        "evaluate_day",
        [](Vec original, Vec reconstructed, Vec baseline, int level) {
            const auto r = evaluate_day(day_of(std::move(original)), day_of(std::move(reconstructed)),
                                        day_of(std::move(baseline)), level);
            py::dict out;
            out["level"] = r.level;
            out["correlation"] = r.correlation;
            out["error_pct"] = r.error_pct;
            out["baseline_correlation"] = r.baseline_correlation;
            out["baseline_error_pct"] = r.baseline_error_pct;
            out["share_abs_diff"] = r.share_abs_diff;
            out["excluded_slots"] = r.excluded_slots;
            return out;
        },
        py::arg("original"), py::arg("reconstructed"), py::arg("baseline"), py::arg("level"));

    m.def(
        "generate_day",
        [](const std::string& date, std::uint64_t seed, double daily_total, double noise_std,
           std::optional<std::vector<std::tuple<double, double, double>>> peaks, std::pair<double, double> jitter,
           bool integer_counts) {
            ProfileParams p;
            p.seed = seed;
            p.daily_total = daily_total;
            p.noise_std = noise_std;
            p.integer_counts = integer_counts;
            if (peaks) {
                p.peaks.clear();
                for (const auto& [c, w, wt] : *peaks) {
                    p.peaks.push_back({c, w, wt});
                }
            }
            return to_array(generate_day(p, date_arg(date), DayJitter{jitter.first, jitter.second}).values);
        },
        py::arg("date"), py::arg("seed") = ProfileParams{}.seed, py::arg("daily_total") = ProfileParams{}.daily_total,
        py::arg("noise_std") = ProfileParams{}.noise_std, py::arg("peaks") = py::none(),
        py::arg("jitter") = std::pair<double, double>{0.0, 0.0}, py::arg("integer_counts") = false,
        "Synthetic day; peaks are (center_slot, width_slots, weight) triples.");

    m.attr("SLOTS_PER_DAY") = kSlotsPerDay;
    m.attr("ERROR_METRIC_LABEL") = std::string(kErrorMetricLabel);
}
