"""Bidding policies (LCB, FCB, AB, multiplier) and offline auction replay."""

from .policies import apply_multiplier_policy, bid_ab, bid_fcb, bid_lcb, multiplier_factor, place_bid
from .replay import (
    ReplayDesign,
    bid_profile,
    bid_vector,
    build_design,
    calibrate_bidder,
    delta_c_array,
    equalize_multiplier,
    multiplier_factors,
    profile_from_trace,
    replay,
    replay_records,
    write_bid_trace,
)

__all__ = [
    "ReplayDesign",
    "apply_multiplier_policy",
    "bid_ab",
    "bid_fcb",
    "bid_lcb",
    "bid_profile",
    "bid_vector",
    "build_design",
    "calibrate_bidder",
    "delta_c_array",
    "equalize_multiplier",
    "multiplier_factor",
    "multiplier_factors",
    "place_bid",
    "profile_from_trace",
    "replay",
    "replay_records",
    "write_bid_trace",
]
