"""Dietary recall nutrient-estimation harness (Python bindings)."""

from ._core import (  # noqa: F401
    FIXTURE_SHA256,
    NUTRIENTS,
    BackendError,
    ConfigError,
    DataError,
    Error,
    GrammarError,
    bland_altman,
    compute_metrics,
    fixture_checksum,
    format_target,
    oracle_estimate,
    parse_food_string,
    parse_prediction,
    partition_cohort,
    render_bland_altman_svg,
    render_food_string,
    render_prompt,
)

__all__ = [name for name in dir() if not name.startswith("_")]
