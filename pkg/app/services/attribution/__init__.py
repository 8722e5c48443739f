"""Exponential attribution model: probabilities, likelihood and fits."""

from .model import (
    attribution_probability,
    fit_lambda,
    half_life,
    log1mexp,
    marginal_contribution,
    marginal_contributions,
    nllh,
    nllh_gradient,
    sample_arrays,
)
from .store import load_attribution_model, save_attribution_model
from .studies import AdvertiserFits, DailyStability, daily_stability, fit_per_advertiser, group_by_campaign

__all__ = [
    "AdvertiserFits",
    "DailyStability",
    "attribution_probability",
    "daily_stability",
    "fit_lambda",
    "fit_per_advertiser",
    "group_by_campaign",
    "half_life",
    "load_attribution_model",
    "log1mexp",
    "marginal_contribution",
    "marginal_contributions",
    "nllh",
    "nllh_gradient",
    "sample_arrays",
    "save_attribution_model",
]
