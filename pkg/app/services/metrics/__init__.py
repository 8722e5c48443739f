"""Utility metrics: attribution functions, (attribution-aware) expected utility, bootstrap and curves."""

from .attribution import attribution_weight, attribution_weights, raw_attribution_flags
from .bootstrap import Uplift, bootstrap_ci, uplift_significance
from .curves import AttributionCurves, attribution_rate_curves, conversion_attribution_curve, display_label_curves
from .reports import write_curve, write_uplift_reports, write_utility_reports
from .suite import reports_from_contributions, uplift_reports, utility_suite, variant_contributions
from .utility import (
    cost_vector,
    empirical_contributions,
    empirical_utility,
    expected_contributions,
    expected_utility,
    total,
    utility_contributions,
    value_vector,
    win_rate,
)

__all__ = [
    "AttributionCurves",
    "Uplift",
    "attribution_rate_curves",
    "attribution_weight",
    "attribution_weights",
    "bootstrap_ci",
    "conversion_attribution_curve",
    "cost_vector",
    "display_label_curves",
    "empirical_contributions",
    "empirical_utility",
    "expected_contributions",
    "expected_utility",
    "raw_attribution_flags",
    "reports_from_contributions",
    "total",
    "uplift_reports",
    "uplift_significance",
    "utility_contributions",
    "utility_suite",
    "value_vector",
    "variant_contributions",
    "win_rate",
    "write_curve",
    "write_uplift_reports",
    "write_utility_reports",
]
