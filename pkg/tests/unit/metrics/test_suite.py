"""Unit tests for app/services/metrics/suite.py, curves.py and reports.py"""
import json
import math

import numpy as np
import pandas as pd
import pytest


def variants(*cells):
    from app.schemas.attribution import AttributionFunctionKind
    from app.schemas.metrics import CostPerturbation, MetricVariant

    return [
        MetricVariant(attribution=AttributionFunctionKind(kind), perturbation=CostPerturbation(beta=beta))
        for kind, beta in cells
    ]


@pytest.fixture
def bootstrap():
    from app.schemas.experiment import BootstrapConfig

    return BootstrapConfig(n_resamples=20, quantile=0.05, seed=3)


class TestUtilitySuite:
    """Tests for utility_suite and uplift_reports functions."""

    def test_bidder_never_wins(self, bootstrap):
        """Should report 0 utility and win rate for a bidder that never wins."""
        from app.schemas.attribution import AttributionFunctionKind
        from app.services.metrics import utility_suite

        costs = np.array([0.5, 0.5, 0.5])
        grid = variants(("LastClick", math.inf))
        weights = {AttributionFunctionKind.LAST_CLICK: np.array([1.0, 0.0, 1.0])}

        reports = utility_suite({"LCB": np.zeros(3)}, costs, np.full(3, 10.0), weights, grid, bootstrap)

        report = reports[("LCB", grid[0].name)]
        assert report.value == 0.0
        assert report.win_rate == 0.0
        assert report.n_auctions == 3
        assert report.metric == "U_LC"
        assert report.beta == "beta_inf"

    def test_single_click_conversions_agree(self, bootstrap):
        """Should give U_A equal to U_LC when every conversion has one click."""
        from app.schemas.attribution import AttributionFunctionKind
        from app.services.metrics import utility_suite

        rng = np.random.default_rng(1)
        costs = rng.uniform(0.1, 1.0, size=50)
        bids = rng.uniform(0.0, 2.0, size=50)
        last_click = (rng.random(50) < 0.3).astype(float)
        weights = {
            AttributionFunctionKind.LAST_CLICK: last_click,
            AttributionFunctionKind.MODEL_NORMALIZED: last_click.copy(),
        }
        grid = variants(("LastClick", 1000.0), ("ModelNormalized", 1000.0))

        reports = utility_suite({"AB": bids}, costs, np.full(50, 5.0), weights, grid, bootstrap)

        assert reports[("AB", grid[0].name)].value == reports[("AB", grid[1].name)].value

    def test_band_contains_value(self, bootstrap):
        """Should report a band containing the utility."""
        from app.schemas.attribution import AttributionFunctionKind
        from app.services.metrics import utility_suite

        rng = np.random.default_rng(8)
        weights = {AttributionFunctionKind.MODEL: rng.random(30)}
        grid = variants(("Model", 1000.0))

        reports = utility_suite(
            {"AB": rng.uniform(0, 2, 30)}, rng.uniform(0.1, 1, 30), np.full(30, 3.0), weights, grid, bootstrap
        )

        report = reports[("AB", grid[0].name)]
        assert report.ci_low <= report.value <= report.ci_high
        assert report.seed == 3

    def test_uplift_reports(self, bootstrap):
        """Should compare every non-reference bidder to the reference."""
        from app.services.metrics import uplift_reports

        grid = variants(("LastClick", math.inf))
        name = grid[0].name
        contributions = {
            ("LCB", name): np.full(10, 1.0),
            ("AB", name): np.full(10, 1.5),
            ("FCB", name): np.full(10, 0.5),
        }

        reports = uplift_reports(contributions, "LCB", grid, bootstrap)

        assert [(r.candidate, r.reference) for r in reports] == [("AB", "LCB"), ("FCB", "LCB")]
        assert reports[0].uplift == pytest.approx(0.5)
        assert reports[1].uplift == pytest.approx(-0.5)
        assert all(r.significant for r in reports)


class TestReportWriters:
    """Tests for write_utility_reports and write_curve functions."""

    def test_tsv_and_json(self, tmp_path, bootstrap):
        """Should write matching TSV and JSON rows."""
        from app.schemas.attribution import AttributionFunctionKind
        from app.services.metrics import utility_suite, write_utility_reports

        grid = variants(("LastClick", math.inf), ("LastClick", 1000.0))
        weights = {AttributionFunctionKind.LAST_CLICK: np.ones(4)}
        reports = utility_suite(
            {"LCB": np.full(4, 1.0)}, np.full(4, 0.5), np.full(4, 2.0), weights, grid, bootstrap
        )

        write_utility_reports(reports.values(), tmp_path / "u.tsv", tmp_path / "u.json")

        table = pd.read_csv(tmp_path / "u.tsv", sep="\t")
        documents = json.loads((tmp_path / "u.json").read_text())
        assert len(table) == len(documents) == 2
        assert table["value"].tolist() == pytest.approx([d["value"] for d in documents])
        assert set(table["beta"]) == {"beta_inf", "beta_1000"}


class TestAttributionRateCurves:
    """Tests for attribution_rate_curves function."""

    def test_no_competitor_curve_is_flat(self, small_world):
        """Should give an attribution rate of 1 in every bucket without competitor clicks."""
        from app.services.data import build_timelines, generate_synthetic_log
        from app.services.metrics import conversion_attribution_curve

        records = generate_synthetic_log(small_world.model_copy(update={"competitor_click_rate": 0.0}))

        curve = conversion_attribution_curve(build_timelines(records), bucket_width=86400)

        assert not curve.empty
        assert (curve["attribution_rate"] == 1.0).all()

    def test_display_curves(self, small_world, tmp_path):
        """Should emit last-click and first-click label rates per bucket."""
        from app.services.data import build_timelines, generate_synthetic_log
        from app.services.metrics import attribution_rate_curves, write_curve

        records = generate_synthetic_log(small_world)

        curves = attribution_rate_curves(build_timelines(records), bucket_width=86400)

        assert set(curves.displays["scheme"]) == {"LastClick", "FirstClick"}
        assert curves.displays["positive_rate"].between(0, 1).all()
        assert curves.conversions["n"].sum() > 0
        path = write_curve(curves.displays, tmp_path / "curves" / "display.csv")
        assert list(pd.read_csv(path).columns) == ["scheme", "bucket_start", "positive_rate", "n"]


@pytest.fixture(scope="class")
def mid_world_timelines():
    from app.schemas.experiment import SyntheticWorldConfig
    from app.services.data import build_timelines, generate_synthetic_log

    return build_timelines(generate_synthetic_log(SyntheticWorldConfig(n_users=5000)))


def weighted_slope(curve, value_column, horizon=7 * 86400, min_n=200):
    kept = curve[(curve["bucket_start"] < horizon) & (curve["n"] >= min_n)]
    assert len(kept) >= 5
    return np.polyfit(kept["bucket_start"], kept[value_column], 1, w=np.sqrt(kept["n"]))[0]


@pytest.mark.slow
class TestCurveShapes:
    """Tests for attribution_rate_curves on a mid-sized synthetic world."""

    def test_label_rate_trends(self, mid_world_timelines):
        """Should give a falling last-click rate and a rising first-click rate in delta_c."""
        from app.services.metrics import display_label_curves

        displays = display_label_curves(mid_world_timelines, bucket_width=6 * 3600)

        last_click = displays[displays["scheme"] == "LastClick"]
        first_click = displays[displays["scheme"] == "FirstClick"]
        assert weighted_slope(last_click, "positive_rate") < 0
        assert weighted_slope(first_click, "positive_rate") > 0

    def test_attribution_rate_within_binomial_band(self, mid_world_timelines):
        """Should keep every well-filled delay bucket within 3 sigma of the generating decay."""
        from app.services.data import extract_attribution_samples
        from app.services.metrics import conversion_attribution_curve

        width = 86400
        curve = conversion_attribution_curve(mid_world_timelines, bucket_width=width)
        samples = extract_attribution_samples(mid_world_timelines).samples
        deltas = np.array([s.delta for s in samples], dtype=float)
        expected = np.exp(-1e-5 * deltas)
        buckets = (deltas // width * width).astype(np.int64)

        checked = 0
        for row in curve.itertuples():
            if row.n < 100:
                continue
            p = expected[buckets == row.bucket_start]
            sigma = math.sqrt(float(np.sum(p * (1 - p)))) / p.size
            assert abs(row.attribution_rate - p.mean()) <= 3 * sigma, row.bucket_start
            checked += 1
        assert checked >= 3
