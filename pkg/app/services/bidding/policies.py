"""Per-auction bidding policies.

LCB and FCB bid the expected value of the display under their own labeling;
AB scales an all-clicks prediction by the attribution the new click would add
over the previous one.
"""
import math
from typing import Optional

from app.schemas.attribution import AttributionModel
from app.schemas.bidding import BidContext, BidderKind, BidderSpec
from app.schemas.conversion import LinearConversionModel
from app.services.attribution.model import marginal_contribution
from app.services.conversion.hashing import context_features, hash_features
from app.services.conversion.prediction import predict


def context_prediction(ctx: BidContext, model: LinearConversionModel, recency: bool = True) -> float:
    vector = hash_features(context_features(ctx.record, ctx.delta_c, recency), model.bits)
    return predict(model, vector)


def bid_lcb(ctx: BidContext, model: LinearConversionModel, recency: bool = True) -> float:
    return ctx.cpa * context_prediction(ctx, model, recency)


def bid_fcb(ctx: BidContext, model: LinearConversionModel, recency: bool = True) -> float:
    return ctx.cpa * context_prediction(ctx, model, recency)


def bid_ab(
    ctx: BidContext,
    conversion_model: LinearConversionModel,
    attribution_model: AttributionModel,
    recency: bool = True,
) -> float:
    """cpa * prediction * (1 - exp(-lambda * delta_c)); no previous click bids the plain expected value."""
    prediction = context_prediction(ctx, conversion_model, recency)
    return ctx.cpa * prediction * marginal_contribution(attribution_model, ctx.delta_c)


def multiplier_factor(decay_rate: float, delta_c: Optional[float], a: float, b: float) -> float:
    if delta_c is None:
        return a
    return a * (1.0 - b * math.exp(-decay_rate * delta_c))


def apply_multiplier_policy(
    reference_bid: float,
    attribution_model: AttributionModel,
    delta_c: Optional[float],
    a: float = 1.0,
    b: float = 1.0,
) -> float:
    """reference_bid * A * (1 - B * exp(-lambda * delta_c)); no previous click leaves factor A."""
    if a <= 0:
        raise ValueError("A must be positive")
    if not 0.0 <= b <= 1.0:
        raise ValueError("B must lie in [0, 1]")
    if a == 1.0 and b == 1.0:
        return reference_bid * marginal_contribution(attribution_model, delta_c)
    return reference_bid * multiplier_factor(attribution_model.decay_rate, delta_c, a, b)


def place_bid(spec: BidderSpec, ctx: BidContext) -> float:
    """Bid of ``spec`` in one auction."""
    if spec.kind == BidderKind.AB:
        return bid_ab(ctx, spec.conversion_model, spec.attribution_model, spec.recency_feature)
    if spec.kind == BidderKind.MULTIPLIER:
        reference = bid_lcb(ctx, spec.conversion_model, spec.recency_feature)
        return apply_multiplier_policy(
            reference, spec.attribution_model, ctx.delta_c, spec.multiplier_a, spec.multiplier_b
        )
    return ctx.cpa * context_prediction(ctx, spec.conversion_model, spec.recency_feature)
