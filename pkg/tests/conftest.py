"""Shared fixtures for simulator tests."""
import os

import pytest

# Set test environment variables before importing app modules
os.environ.setdefault("LOG_LEVEL", "WARNING")
os.environ.setdefault("OUTPUT_DIR", "runs/test")

from app.schemas.attribution import AttributionModel  # noqa: E402
from app.schemas.experiment import SyntheticWorldConfig  # noqa: E402
from app.schemas.records import ImpressionRecord  # noqa: E402

# ln 2 / 6.25e-6 rounded to whole seconds: one half-life of the reference decay rate
HALF_LIFE_GAP = 110904
REFERENCE_LAMBDA = 6.25e-6


@pytest.fixture
def make_record():
    """Factory for impression records with sensible defaults."""
    counter = {"next": 0}

    def _make(timestamp=0, user_id="u1", campaign_id="c1", cost=0.1, cpo=10.0, features=(), **kwargs):
        record_id = kwargs.pop("record_id", counter["next"])
        counter["next"] += 1
        return ImpressionRecord(
            record_id=record_id,
            timestamp=timestamp,
            user_id=user_id,
            campaign_id=campaign_id,
            cost=cost,
            cpo=cpo,
            features=features,
            **kwargs,
        )

    return _make


@pytest.fixture
def reference_model():
    """Attribution model whose half-life is one HALF_LIFE_GAP."""
    return AttributionModel(decay_rate=REFERENCE_LAMBDA)


@pytest.fixture
def three_click_conversion(make_record):
    """Three clicks one half-life apart, then an attributed conversion 1000 s after the last click."""
    conversion_ts = 2 * HALF_LIFE_GAP + 1000
    clicks = [
        make_record(
            timestamp=i * HALF_LIFE_GAP,
            features=((0, "f0_0"),),
            click=True,
            conversion=True,
            attribution=True,
            click_pos=i,
            click_nb=3,
            conversion_timestamp=conversion_ts,
            conversion_value=50.0,
        )
        for i in range(3)
    ]
    unclicked = make_record(
        timestamp=HALF_LIFE_GAP // 2,
        features=((0, "f0_1"),),
        conversion=True,
        attribution=True,
        conversion_timestamp=conversion_ts,
        conversion_value=50.0,
    )
    return clicks + [unclicked]


@pytest.fixture
def small_world():
    """Small synthetic world: a few hundred users over 30 days."""
    return SyntheticWorldConfig(
        n_users=400,
        horizon=30 * 86400,
        impression_rate=40 / (30 * 86400),
        click_prob=0.2,
        conversion_prob_given_click=0.3,
        conversion_delay_rate=1 / 86400,
        competitor_click_rate=1e-5,
        rng_seed=7,
    )
