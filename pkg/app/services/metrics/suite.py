"""Utility grid over bidders and metric variants, with bootstrap bands and uplifts."""
import logging
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from app.schemas.attribution import AttributionFunctionKind
from app.schemas.experiment import BootstrapConfig
from app.schemas.metrics import MetricVariant, UpliftReport, UtilityReport
from app.services.metrics.bootstrap import bootstrap_ci, uplift_significance
from app.services.metrics.utility import total, utility_contributions, win_rate

logger = logging.getLogger(__name__)

CellKey = Tuple[str, str]


def variant_contributions(
    bids: Mapping[str, np.ndarray],
    costs: np.ndarray,
    values: np.ndarray,
    weights: Mapping[AttributionFunctionKind, np.ndarray],
    variants: Sequence[MetricVariant],
) -> Dict[CellKey, np.ndarray]:
    """Per-record contributions of every (bidder, variant) cell."""
    cells: Dict[CellKey, np.ndarray] = {}
    for bidder, bidder_bids in bids.items():
        for variant in variants:
            cells[(bidder, variant.name)] = utility_contributions(
                bidder_bids, costs, values, weights[variant.attribution], variant.perturbation
            )
    return cells


def utility_suite(
    bids: Mapping[str, np.ndarray],
    costs: np.ndarray,
    values: np.ndarray,
    weights: Mapping[AttributionFunctionKind, np.ndarray],
    variants: Sequence[MetricVariant],
    bootstrap: BootstrapConfig,
) -> Dict[CellKey, UtilityReport]:
    """One report per (bidder, variant); inputs aligned on records ordered by record id."""
    contributions = variant_contributions(bids, costs, values, weights, variants)
    return reports_from_contributions(contributions, bids, costs, variants, bootstrap)


def reports_from_contributions(
    contributions: Mapping[CellKey, np.ndarray],
    bids: Mapping[str, np.ndarray],
    costs: np.ndarray,
    variants: Sequence[MetricVariant],
    bootstrap: BootstrapConfig,
) -> Dict[CellKey, UtilityReport]:
    reports: Dict[CellKey, UtilityReport] = {}
    by_name = {v.name: v for v in variants}
    for (bidder, name), cell in contributions.items():
        value = total(cell)
        low, high = bootstrap_ci(cell, bootstrap.n_resamples, bootstrap.quantile, bootstrap.seed)
        reports[(bidder, name)] = UtilityReport(
            bidder=bidder,
            metric=by_name[name].attribution.metric_name,
            beta=by_name[name].perturbation.label,
            value=value,
            n_auctions=int(cell.shape[0]),
            win_rate=win_rate(bids[bidder], costs),
            ci_low=min(low, value),
            ci_high=max(high, value),
            seed=bootstrap.seed,
        )
    logger.info(f"Scored {len(reports)} (bidder, metric) cells")
    return reports


def uplift_reports(
    contributions: Mapping[CellKey, np.ndarray],
    reference: str,
    variants: Sequence[MetricVariant],
    bootstrap: BootstrapConfig,
) -> List[UpliftReport]:
    """Pairwise uplift of every other bidder over ``reference`` for every variant."""
    bidders = sorted({bidder for bidder, _ in contributions} - {reference})
    reports = []
    for candidate in bidders:
        for variant in variants:
            estimate = uplift_significance(
                contributions[(candidate, variant.name)],
                contributions[(reference, variant.name)],
                bootstrap.n_resamples,
                bootstrap.quantile,
                bootstrap.seed,
            )
            reports.append(
                UpliftReport(
                    candidate=candidate,
                    reference=reference,
                    metric=variant.attribution.metric_name,
                    beta=variant.perturbation.label,
                    uplift=estimate.uplift,
                    ci_low=estimate.ci_low,
                    ci_high=estimate.ci_high,
                    significant=estimate.significant,
                    seed=bootstrap.seed,
                )
            )
    return reports
