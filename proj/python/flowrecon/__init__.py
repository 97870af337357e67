"""Haar-wavelet reconstruction of 5-minute traffic flow from aggregated counts."""

from ._flowrecon import (
    ERROR_METRIC_LABEL,
    SLOTS_PER_DAY,
    FlowreconError,
    aggregate,
    build_matrix,
    evaluate_day,
    extract_details,
    generate_day,
    haar_forward,
    haar_inverse,
    max_levels,
    mean_abs_pct_error,
    normalize_percent,
    pearson,
    reconstruct_day,
    staircase_baseline,
)

__all__ = [
    "ERROR_METRIC_LABEL",
    "SLOTS_PER_DAY",
    "FlowreconError",
    "aggregate",
    "build_matrix",
    "evaluate_day",
    "extract_details",
    "generate_day",
    "haar_forward",
    "haar_inverse",
    "max_levels",
    "mean_abs_pct_error",
    "normalize_percent",
    "pearson",
    "reconstruct_day",
    "staircase_baseline",
]
