"""Unit tests for app/services/bidding/replay.py"""
import math

import numpy as np
import pandas as pd
import pytest

BITS = 10


def constant_model(probability):
    from app.schemas.conversion import LinearConversionModel

    return LinearConversionModel(
        weights=np.zeros(1 << BITS), bias=math.log(probability / (1.0 - probability)), l2=1.0
    )


def spec(kind, attribution_model=None, probability=0.02, **kwargs):
    from app.schemas.bidding import BidderKind, BidderSpec

    return BidderSpec(
        kind=BidderKind(kind),
        conversion_model=constant_model(probability),
        attribution_model=attribution_model,
        **kwargs,
    )


@pytest.fixture
def click_stream(make_record):
    """One user: a click at t=0 and impressions 0, 30 min, 2 h and 25 h after it, plus a fresh user."""
    records = [make_record(timestamp=0, click=True, cpo=10.0)]
    records += [make_record(timestamp=t, cpo=10.0) for t in (0, 1800, 7200, 90000)]
    records.append(make_record(timestamp=500, user_id="u2", cpo=10.0))
    return records


class TestReplay:
    """Tests for build_design, bid_vector and replay functions."""

    def test_delta_c(self, click_stream):
        """Should measure the time since the last strictly earlier click."""
        from app.services.bidding import delta_c_array
        from app.services.data import build_timelines

        delta = delta_c_array(click_stream, build_timelines(click_stream))

        assert np.isnan(delta[0]) and np.isnan(delta[1]) and np.isnan(delta[5])
        assert delta[2:5].tolist() == [1800.0, 7200.0, 90000.0]

    def test_matches_place_bid(self, click_stream, reference_model):
        """Should agree with the per-auction policies."""
        from app.schemas.bidding import BidContext
        from app.services.bidding import place_bid, replay_records
        from app.services.data import build_timelines, time_since_last_click

        timelines = build_timelines(click_stream)
        bidders = (
            spec("LCB"),
            spec("AB", reference_model),
            spec("MultiplierPolicy", reference_model, multiplier_a=1.3, multiplier_b=0.4),
        )
        for bidder in bidders:
            trace = replay_records(click_stream, timelines, bidder)
            expected = [
                place_bid(bidder, BidContext.from_record(r, time_since_last_click(timelines[r.key], r.timestamp)))
                for r in click_stream
            ]
            assert trace.bids.tolist() == pytest.approx(expected, rel=1e-12)
            assert trace.record_ids.tolist() == [r.record_id for r in click_stream]
            assert len(trace) == len(click_stream)

    def test_bids_non_negative_and_finite(self, click_stream, reference_model):
        """Should place finite non-negative bids."""
        from app.services.bidding import replay_records
        from app.services.data import build_timelines

        trace = replay_records(click_stream, build_timelines(click_stream), spec("AB", reference_model))

        assert np.all(np.isfinite(trace.bids))
        assert np.all(trace.bids >= 0)


class TestCalibrateBidder:
    """Tests for calibrate_bidder and equalize_multiplier functions."""

    def test_calibrate_to_reference(self, click_stream, reference_model):
        """Should make the bidder spend the reference total."""
        from app.services.bidding import bid_vector, build_design, calibrate_bidder
        from app.services.data import build_timelines

        design = build_design(click_stream, build_timelines(click_stream), BITS)
        reference_total = float(bid_vector(spec("LCB"), design).sum())

        calibrated = calibrate_bidder(spec("AB", reference_model), design, reference_total)

        assert bid_vector(calibrated, design).sum() == pytest.approx(reference_total, rel=1e-6)

    def test_equalize_multiplier(self, reference_model):
        """Should pick A so the shaped bids spend the reference total."""
        from app.services.bidding import equalize_multiplier, multiplier_factors

        reference_bids = np.array([1.0, 2.0, 0.5])
        delta_c = np.array([np.nan, 110904.0, 1e6])

        a = equalize_multiplier(reference_bids, delta_c, reference_model.decay_rate, b=1.0)

        shaped = reference_bids * multiplier_factors(reference_model.decay_rate, delta_c, a, 1.0)
        assert shaped.sum() == pytest.approx(reference_bids.sum())
        assert a > 1.0

    def test_equalize_without_bids(self, reference_model):
        """Should fail when every shaped bid is zero."""
        from app.core.exceptions import CalibrationError
        from app.services.bidding import equalize_multiplier

        with pytest.raises(CalibrationError):
            equalize_multiplier(np.array([1.0]), np.array([0.0]), reference_model.decay_rate, b=1.0, reference_total=1.0)


class TestBidProfile:
    """Tests for bid_profile, profile_from_trace and write_bid_trace functions."""

    def test_ab_profile_rises(self, click_stream, reference_model):
        """Should start near 0 after a click and not decrease with a constant prediction."""
        from app.services.bidding import bid_profile
        from app.services.data import build_timelines

        profile = bid_profile(
            click_stream, build_timelines(click_stream), spec("AB", reference_model), bucket_width=1800, horizon=86400
        )

        assert profile["bucket_start"].tolist() == [1800, 7200]
        assert profile["mean_bid"].is_monotonic_increasing
        assert (profile["bidder"] == "AB").all()

    def test_horizon_excludes_late_auctions(self, click_stream):
        """Should omit auctions past the horizon and those without a prior click."""
        from app.services.bidding import bid_profile
        from app.services.data import build_timelines

        profile = bid_profile(click_stream, build_timelines(click_stream), spec("LCB"), bucket_width=3600, horizon=3600)

        assert profile["bucket_start"].tolist() == [0]
        assert profile["n"].tolist() == [1]

    def test_write_trace(self, tmp_path, click_stream):
        """Should write an empty delta_c cell for auctions with no prior click."""
        from app.services.bidding import replay_records, write_bid_trace
        from app.services.data import build_timelines

        trace = replay_records(click_stream, build_timelines(click_stream), spec("FCB"))

        path = write_bid_trace(trace, tmp_path / "traces" / "FCB.tsv")

        frame = pd.read_csv(path, sep="\t")
        assert list(frame.columns) == ["record_id", "bidder", "delta_c", "prediction", "bid"]
        assert frame["delta_c"].isna().sum() == 3
        assert frame["bid"].tolist() == pytest.approx(trace.bids.tolist())
