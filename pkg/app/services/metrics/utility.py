"""Empirical, expected and attribution-aware expected utility of a replayed bid trace.

A display won at cost c with attribution weight a and value v pays a*v - c.
Under a Gamma(beta*c_i + 1, beta) perturbation of the observed cost c_i the
expected payoff of bidding T has the closed form

    a*v*P(alpha, beta*T) - (alpha/beta)*P(alpha + 1, beta*T),  alpha = beta*c_i + 1

with P the regularized lower incomplete gamma function.
"""
import math
from typing import Sequence

import numpy as np
from scipy.special import gammainc

from app.core.exceptions import MetricDomainError
from app.schemas.metrics import CostPerturbation
from app.schemas.records import ImpressionRecord


def value_vector(records: Sequence[ImpressionRecord], column: str = "conversion_value") -> np.ndarray:
    """v_i: the conversion value when logged (and selected), the cpo otherwise."""
    if column == "cpo":
        return np.fromiter((r.cpo for r in records), dtype=float, count=len(records))
    return np.fromiter(
        (r.conversion_value if r.conversion_value is not None else r.cpo for r in records),
        dtype=float,
        count=len(records),
    )


def cost_vector(records: Sequence[ImpressionRecord]) -> np.ndarray:
    return np.fromiter((r.cost for r in records), dtype=float, count=len(records))


def empirical_contributions(bids: np.ndarray, costs: np.ndarray, values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """(a*v - c) on auctions won (bid strictly above cost), 0 elsewhere."""
    won = bids > costs
    return np.where(won, weights * values - costs, 0.0)


def expected_contributions(
    bids: np.ndarray,
    costs: np.ndarray,
    values: np.ndarray,
    weights: np.ndarray,
    perturbation: CostPerturbation,
) -> np.ndarray:
    """Per-display expected payoff; an infinite beta gives the empirical payoff."""
    if perturbation.is_infinite:
        return empirical_contributions(bids, costs, values, weights)
    bad = np.flatnonzero(costs <= 0)
    if bad.size:
        raise MetricDomainError(
            f"finite beta needs positive costs; {bad.size} offending records, first {bad[:10].tolist()}",
            details={"records": bad.tolist()},
        )
    beta = perturbation.beta
    alpha = beta * costs + 1.0
    x = beta * np.maximum(bids, 0.0)
    return weights * values * gammainc(alpha, x) - (alpha / beta) * gammainc(alpha + 1.0, x)


def total(contributions: np.ndarray) -> float:
    """Exactly rounded sum, independent of record order."""
    return math.fsum(contributions.tolist())


def empirical_utility(bids: np.ndarray, costs: np.ndarray, values: np.ndarray, weights: np.ndarray) -> float:
    return total(empirical_contributions(bids, costs, values, weights))


def expected_utility(
    bids: np.ndarray,
    costs: np.ndarray,
    values: np.ndarray,
    weights: np.ndarray,
    perturbation: CostPerturbation,
) -> float:
    return total(expected_contributions(bids, costs, values, weights, perturbation))


def utility_contributions(
    bids: np.ndarray,
    costs: np.ndarray,
    values: np.ndarray,
    weights: np.ndarray,
    perturbation: CostPerturbation,
) -> np.ndarray:
    """Per-record contributions, kept so test days can be pooled before bootstrapping."""
    return expected_contributions(
        np.asarray(bids, dtype=float),
        np.asarray(costs, dtype=float),
        np.asarray(values, dtype=float),
        np.asarray(weights, dtype=float),
        perturbation,
    )


def win_rate(bids: np.ndarray, costs: np.ndarray) -> float:
    if bids.shape[0] == 0:
        return 0.0
    return float(np.count_nonzero(bids > costs)) / bids.shape[0]
