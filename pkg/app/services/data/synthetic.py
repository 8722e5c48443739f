"""Synthetic impression logs with a known competitor click rate.

Competitor clicks form a Poisson process, so a conversion whose last platform
click happened ``d`` seconds earlier stays attributed with probability
``exp(-rate * d)``: the generated log follows the exponential attribution model
exactly and its rate is the oracle for the lambda fit.
"""
import bisect
import logging
import math
from dataclasses import replace
from typing import Dict, List

import numpy as np

from app.schemas.experiment import SyntheticWorldConfig
from app.schemas.records import DAY_SECONDS, ImpressionRecord

logger = logging.getLogger(__name__)


def _feature_effect(tokens: List[str], effects: Dict[str, float]) -> float:
    effect = 1.0
    for token in tokens:
        effect *= effects.get(token, 1.0)
    return effect


def _simulate_user(
    rng: np.random.Generator,
    config: SyntheticWorldConfig,
    user_index: int,
    window: int,
    token_names: List[List[str]],
) -> List[ImpressionRecord]:
    campaign = int(rng.integers(config.n_campaigns))
    segment = token_names[0][int(rng.integers(config.tokens_per_field))]
    n_impressions = int(rng.poisson(config.impression_rate * config.horizon)) if config.horizon > 0 else 0
    if n_impressions == 0:
        return []

    times = config.start_timestamp + np.sort(rng.integers(0, config.horizon, size=n_impressions))
    clicked = rng.random(n_impressions) < config.click_prob
    context = rng.integers(config.tokens_per_field, size=(n_impressions, config.n_feature_fields - 1))
    costs = rng.lognormal(math.log(config.cost_median), config.cost_sigma, size=n_impressions)

    features = []
    for i in range(n_impressions):
        tokens = [segment] + [token_names[f + 1][int(context[i, f])] for f in range(config.n_feature_fields - 1)]
        features.append(tokens)

    # Each click may trigger a conversion after an exponential delay.
    conversion_times = set()
    for i in np.flatnonzero(clicked):
        p = min(1.0, config.conversion_prob_given_click * _feature_effect(features[i], config.base_conversion_rate_per_feature))
        if rng.random() < p and config.conversion_delay_rate > 0:
            delay = max(1, int(round(rng.exponential(1.0 / config.conversion_delay_rate))))
            conversion_times.add(int(times[i]) + delay)
    conversions = sorted(conversion_times)

    # Every impression belongs to the first conversion at or after it, inside the window.
    owner: List[int] = []
    for t in times:
        j = bisect.bisect_left(conversions, int(t))
        owner.append(j if j < len(conversions) and conversions[j] - int(t) <= window else -1)

    clicks_of: Dict[int, List[int]] = {}
    for i in range(n_impressions):
        if owner[i] >= 0 and clicked[i]:
            clicks_of.setdefault(owner[i], []).append(i)

    base_rate = config.campaign_rate(campaign)
    attributed: Dict[int, bool] = {}
    values: Dict[int, float] = {}
    for j, conversion_ts in enumerate(conversions):
        values[j] = round(float(rng.lognormal(math.log(config.conversion_value_median), config.conversion_value_sigma)), 4)
        clicks = clicks_of.get(j)
        if not clicks:
            attributed[j] = False
            continue
        rate = base_rate
        if config.rate_shift_day is not None and conversion_ts // DAY_SECONDS >= config.rate_shift_day:
            rate *= config.rate_shift_factor
        gap = conversion_ts - int(times[clicks[-1]])
        attributed[j] = True if rate == 0 else float(rng.exponential(1.0 / rate)) > gap

    position_of = {i: pos for clicks in clicks_of.values() for pos, i in enumerate(clicks)}

    records = []
    user_id = f"u{user_index}"
    campaign_id = f"c{campaign}"
    for i in range(n_impressions):
        j = owner[i]
        has_conversion = j >= 0
        pos = position_of.get(i)
        records.append(
            ImpressionRecord(
                record_id=-1,
                timestamp=int(times[i]),
                user_id=user_id,
                campaign_id=campaign_id,
                cost=round(float(costs[i]), 6),
                cpo=config.cpo,
                features=tuple(enumerate(features[i])),
                click=bool(clicked[i]),
                conversion=has_conversion,
                attribution=has_conversion and attributed[j],
                click_pos=pos,
                click_nb=len(clicks_of[j]) if pos is not None else None,
                conversion_timestamp=conversions[j] if has_conversion else None,
                conversion_value=values[j] if has_conversion else None,
            )
        )
    return records


def generate_synthetic_log(config: SyntheticWorldConfig) -> List[ImpressionRecord]:
    """Generate a log deterministically from ``config.rng_seed``, ordered by timestamp then user."""
    rng = np.random.default_rng(config.rng_seed)
    window = config.attribution_window_days * DAY_SECONDS
    token_names = [[f"f{f}_{v}" for v in range(config.tokens_per_field)] for f in range(config.n_feature_fields)]

    per_user = []
    for user_index in range(config.n_users):
        per_user.extend(_simulate_user(rng, config, user_index, window, token_names))

    per_user.sort(key=lambda r: r.timestamp)
    records = [replace(r, record_id=i) for i, r in enumerate(per_user)]

    n_clicks = sum(r.click for r in records)
    n_conversions = sum(1 for r in records if r.click_pos == 0)
    logger.info(
        f"Generated {len(records)} impressions for {config.n_users} users: "
        f"{n_clicks} clicks, {n_conversions} clicked conversions"
    )
    return records
