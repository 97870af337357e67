import math

import numpy as np
import pytest

import flowrecon as fr


def commuter_days(n, seed=5):
    return [fr.generate_day(f"2012-03-{d:02d}", seed=seed, jitter=(2.0, 0.08)) for d in range(1, n + 1)]


def test_haar_small_example():
    w = fr.haar_forward([4.0, 2.0, 6.0, 6.0], 2)
    assert w["approximation"][0] == pytest.approx(9.0)
    assert w["details"][1][0] == pytest.approx(-3.0)
    assert w["details"][0][0] == pytest.approx(math.sqrt(2.0))
    back = fr.haar_inverse(w["approximation"], w["details"])
    np.testing.assert_allclose(back, [4, 2, 6, 6], atol=1e-12)


def test_round_trip_and_levels():
    rng = np.random.default_rng(0)
    x = rng.uniform(0, 100, 288)
    for k in range(1, fr.max_levels(288) + 1):
        w = fr.haar_forward(x, k)
        np.testing.assert_allclose(fr.haar_inverse(w["approximation"], w["details"]), x, atol=1e-9)
    assert fr.max_levels(288) == 5


def test_aggregate_matches_numpy_block_sums():
    x = np.arange(1.0, 289.0)
    for n in range(1, 6):
        np.testing.assert_array_equal(fr.aggregate(x, n), x.reshape(-1, 2**n).sum(axis=1))


def test_pipeline_beats_staircase_at_level_4():
    matrix = fr.build_matrix(commuter_days(13), scenario=1)
    target = fr.generate_day("2012-05-08", seed=77, noise_std=0.03, jitter=(2.0, 0.08))
    agg = fr.aggregate(target, 4)
    rec = fr.reconstruct_day(matrix, agg, 4)
    base = fr.staircase_baseline(agg, 4)
    assert len(rec) == fr.SLOTS_PER_DAY
    r = fr.evaluate_day(target, rec, base, 4)
    assert r["correlation"] > r["baseline_correlation"]
    assert r["correlation"] == pytest.approx(fr.pearson(fr.normalize_percent(target), fr.normalize_percent(rec)))


def test_scenario2_has_no_fine_detail():
    matrix = fr.build_matrix(commuter_days(5), scenario=2)
    d = fr.extract_details(matrix, 4)
    assert max(abs(d[0]).max(), abs(d[1]).max()) < 1e-9
    assert abs(d[3]).max() > 1.0


def test_metrics():
    assert fr.pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(0.9819805060619657)
    m = fr.mean_abs_pct_error([0.0, 0.1, 0.2], [0.3, 0.11, 0.18])
    assert m["percent"] == pytest.approx(10.0)
    assert m["excluded_slots"] == 1
    assert fr.ERROR_METRIC_LABEL == "MAPE (interpretation)"


def test_generate_day_is_deterministic_and_totals():
    a = fr.generate_day("2012-03-13", seed=3)
    b = fr.generate_day("2012-03-13", seed=3)
    np.testing.assert_array_equal(a, b)
    quiet = fr.generate_day("2012-03-13", noise_std=0.0, daily_total=1000.0)
    assert quiet.sum() == pytest.approx(1000.0, rel=1e-9)


def test_errors_carry_codes():
    with pytest.raises(fr.FlowreconError) as info:
        fr.haar_forward([1.0, 2.0, 3.0], 1)
    assert info.value.code == "NotDyadicallyDivisible"
    with pytest.raises(fr.FlowreconError, match="ZeroDailyTotal"):
        fr.normalize_percent(np.zeros(288))
    with pytest.raises(ValueError):
        fr.pearson([1, 1, 1], [1, 2, 3])
