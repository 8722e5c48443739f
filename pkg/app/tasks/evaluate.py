"""evaluate: sliding-split replay of every bidder, scored on the utility grid."""
import dataclasses
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from app.core.config import settings
from app.schemas.attribution import (
    AttributionFunction,
    AttributionFunctionKind,
    AttributionModel,
    AttributionScheme,
    SchemeKind,
)
from app.schemas.bidding import BidderKind, BidderSpec, BidTrace
from app.schemas.conversion import LinearConversionModel
from app.schemas.experiment import ExperimentConfig
from app.schemas.metrics import CostPerturbation, MetricVariant
from app.schemas.records import ImpressionRecord
from app.services.attribution import fit_lambda, load_attribution_model
from app.services.bidding import (
    bid_vector,
    build_design,
    calibrate_bidder,
    equalize_multiplier,
    profile_from_trace,
    replay,
    write_bid_trace,
)
from app.services.conversion import save_conversion_model, train_on_clicks
from app.services.data import (
    ConversionIndex,
    SplitPair,
    Timelines,
    build_timelines,
    extract_attribution_samples,
    sliding_split,
)
from app.services.labeling import build_training_set
from app.services.metrics import (
    attribution_rate_curves,
    attribution_weights,
    cost_vector,
    reports_from_contributions,
    uplift_reports,
    value_vector,
    variant_contributions,
    write_curve,
    write_uplift_reports,
    write_utility_reports,
)
from app.tasks.stages import run_seeds, stage, write_manifest
from app.tasks.synth import load_records

logger = logging.getLogger(__name__)


@dataclass
class SplitOutcome:
    """Everything one test day contributes to the pooled reports."""

    index: int
    record_ids: np.ndarray
    costs: np.ndarray
    values: np.ndarray
    weights: Dict[AttributionFunctionKind, np.ndarray]
    traces: Dict[str, BidTrace]
    attribution_model: AttributionModel
    calibrations: Dict[str, float] = field(default_factory=dict)
    models: Dict[str, LinearConversionModel] = field(default_factory=dict)
    multiplier_a: Optional[float] = None


def metric_variants(config: ExperimentConfig) -> List[MetricVariant]:
    return [
        MetricVariant(attribution=kind, perturbation=CostPerturbation(beta=beta))
        for kind, beta in itertools.product(config.attribution_functions, config.betas)
    ]


def _fit_options(config: ExperimentConfig) -> Dict[str, Any]:
    fit = config.attribution
    return dict(tolerance=fit.tolerance, max_iter=fit.max_iter, lambda_min=fit.lambda_min, lambda_max=fit.lambda_max)


def _split_attribution_model(config: ExperimentConfig, pair: SplitPair) -> AttributionModel:
    if config.attribution.model_path is not None:
        return load_attribution_model(config.attribution.model_path)
    samples = extract_attribution_samples(build_timelines(pair.train), settings.attribution_window_seconds).samples
    return fit_lambda(samples, fitted_at=max(r.timestamp for r in pair.train), **_fit_options(config))


def _scheme(kind: SchemeKind, model: AttributionModel) -> AttributionScheme:
    if kind == SchemeKind.ATTRIBUTION_MODEL:
        return AttributionScheme(kind=kind, normalized=True, model=model)
    return AttributionScheme(kind=kind)


def _train_models(
    config: ExperimentConfig,
    pair: SplitPair,
    timelines: Timelines,
    index: ConversionIndex,
    attribution_model: AttributionModel,
) -> Dict[SchemeKind, LinearConversionModel]:
    training = config.training
    needed = {training.scheme_for(b) for b in config.bidders}
    kinds = sorted(needed, key=lambda k: k.value)
    models = {}
    for kind in kinds:
        clicks = build_training_set(
            pair.train, timelines, _scheme(kind, attribution_model), index=index, recency=training.recency_feature
        )
        models[kind] = train_on_clicks(clicks, training.hash_bits, training.l2, training.max_iter, training.tolerance)
    return models


def _attribution_weights(
    config: ExperimentConfig, records: Sequence[ImpressionRecord], index: ConversionIndex, model: AttributionModel
) -> Dict[AttributionFunctionKind, np.ndarray]:
    weights = {}
    for kind in config.attribution_functions:
        fn = AttributionFunction(kind=kind, model=None if kind == AttributionFunctionKind.LAST_CLICK else model)
        weights[kind] = attribution_weights(fn, records, index)
    return weights


def evaluate_split(
    config: ExperimentConfig, pair: SplitPair, timelines: Timelines, index: ConversionIndex
) -> SplitOutcome:
    """Train, calibrate and replay every bidder on one (train days, test day) pair."""
    k = pair.index
    training = config.training
    with stage("fit-attribution", k):
        attribution_model = _split_attribution_model(config, pair)
    with stage("train", k):
        models = _train_models(config, pair, timelines, index, attribution_model)

    with stage("replay", k):
        design = build_design(pair.test, timelines, training.hash_bits, training.recency_feature)
        reference_kind = config.effective_reference

        def spec_for(kind: BidderKind) -> BidderSpec:
            return BidderSpec(
                kind=kind,
                conversion_model=models[training.scheme_for(kind)],
                attribution_model=attribution_model if kind.needs_attribution_model else None,
                multiplier_a=config.multiplier.a,
                multiplier_b=config.multiplier.b,
                recency_feature=training.recency_feature,
            )

        reference = spec_for(reference_kind)
        reference_bids = bid_vector(reference, design)
        reference_total = float(reference_bids.sum())

    outcome = SplitOutcome(
        index=k,
        record_ids=design.record_ids,
        costs=cost_vector(pair.test),
        values=value_vector(pair.test, config.value_column),
        weights={},
        traces={},
        attribution_model=attribution_model,
    )
    for kind in config.bidders:
        with stage(f"calibrate-{kind.value}", k):
            spec = spec_for(kind)
            if kind == BidderKind.MULTIPLIER:
                # A equalizes spend in place of a calibration of the shaped model.
                if config.multiplier.equalize_spend and reference_total > 0 and kind != reference_kind:
                    shaped = dataclasses.replace(spec, kind=BidderKind.LCB, attribution_model=None)
                    a = equalize_multiplier(
                        bid_vector(shaped, design),
                        design.delta_c,
                        attribution_model.decay_rate,
                        config.multiplier.b,
                        reference_total,
                    )
                    spec = dataclasses.replace(spec, multiplier_a=a)
                outcome.multiplier_a = spec.multiplier_a
            elif kind != reference_kind and reference_total > 0:
                spec = calibrate_bidder(spec, design, reference_total)
            outcome.calibrations[kind.value] = spec.conversion_model.calibration
            outcome.models[kind.value] = spec.conversion_model
        with stage(f"replay-{kind.value}", k):
            outcome.traces[kind.value] = replay(spec, design)

    with stage("attribution-weights", k):
        outcome.weights = _attribution_weights(config, pair.test, index, attribution_model)
    logger.info(f"Split {k} (test day {pair.test_day}): {len(pair.test)} auctions, calibrations {outcome.calibrations}")
    return outcome


def _pooled_trace(outcomes: Sequence[SplitOutcome], bidder: str, order: np.ndarray) -> BidTrace:
    traces = [o.traces[bidder] for o in outcomes]
    return BidTrace(
        bidder=traces[0].bidder,
        record_ids=np.concatenate([t.record_ids for t in traces])[order],
        delta_c=np.concatenate([t.delta_c for t in traces])[order],
        predictions=np.concatenate([t.predictions for t in traces])[order],
        bids=np.concatenate([t.bids for t in traces])[order],
    )


def cmd_evaluate(config: ExperimentConfig, records: Optional[Sequence[ImpressionRecord]] = None) -> Dict[str, Any]:
    """Run the sliding-split protocol and write reports, curves, traces and the manifest.

    Test days are pooled record by record (ordered by record id) before scoring,
    so bootstrap bands resample displays across all test days.
    """
    out_dir = config.output_dir
    records = list(records) if records is not None else load_records(config)
    window = settings.attribution_window_seconds
    written: List[Path] = []

    with stage("split"):
        pairs = sliding_split(records, config.split.train_days, config.split.test_days)
    with stage("timelines"):
        timelines = build_timelines(records)
        index = ConversionIndex(timelines, window)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(lambda p: evaluate_split(config, p, timelines, index), pairs))
    else:
        outcomes = [evaluate_split(config, p, timelines, index) for p in pairs]

    bidders = [kind.value for kind in config.bidders]
    variants = metric_variants(config)
    with stage("score"):
        record_ids = np.concatenate([o.record_ids for o in outcomes])
        order = np.argsort(record_ids, kind="stable")
        costs = np.concatenate([o.costs for o in outcomes])[order]
        values = np.concatenate([o.values for o in outcomes])[order]
        weights = {
            kind: np.concatenate([o.weights[kind] for o in outcomes])[order] for kind in config.attribution_functions
        }
        traces = {bidder: _pooled_trace(outcomes, bidder, order) for bidder in bidders}
        bids = {bidder: trace.bids for bidder, trace in traces.items()}
        contributions = variant_contributions(bids, costs, values, weights, variants)
        utilities = reports_from_contributions(contributions, bids, costs, variants, config.bootstrap)
        uplifts = uplift_reports(contributions, config.effective_reference.value, variants, config.bootstrap)

    with stage("report"):
        write_utility_reports(utilities.values(), out_dir / "utility_report.tsv", out_dir / "utility_report.json")
        write_uplift_reports(uplifts, out_dir / "uplift_report.tsv", out_dir / "uplift_report.json")
        written += [out_dir / f"{name}.{ext}" for name in ("utility_report", "uplift_report") for ext in ("tsv", "json")]

        splits = pd.DataFrame(
            [
                {
                    "split": o.index,
                    "test_day": pairs[o.index].test_day,
                    "n_auctions": int(o.record_ids.shape[0]),
                    "lambda": o.attribution_model.decay_rate,
                    "multiplier_a": o.multiplier_a if o.multiplier_a is not None else float("nan"),
                    **{f"calibration_{b}": c for b, c in o.calibrations.items()},
                }
                for o in outcomes
            ]
        )
        splits.to_csv(out_dir / "splits.tsv", sep="\t", index=False, na_rep="")
        written.append(out_dir / "splits.tsv")

        for bidder, trace in traces.items():
            written.append(write_bid_trace(trace, out_dir / "traces" / f"{bidder}.tsv"))

        for o in outcomes:
            for bidder, model in o.models.items():
                path = out_dir / "models" / f"split{o.index}_{bidder}.json"
                written.append(save_conversion_model(model, path))

    with stage("curves"):
        curves = attribution_rate_curves(timelines, config.curves.attribution_bucket_width, index, window)
        written.append(write_curve(curves.conversions, out_dir / "curves" / "conversion_attribution.csv"))
        written.append(write_curve(curves.displays, out_dir / "curves" / "display_label_rate.csv"))
        profiles = pd.concat(
            [profile_from_trace(t, config.curves.bid_bucket_width, config.curves.bid_horizon) for t in traces.values()],
            ignore_index=True,
        )
        written.append(write_curve(profiles, out_dir / "curves" / "bid_profile.csv"))

    write_manifest(config, out_dir, "evaluate", written, run_seeds(config))
    logger.info(f"Evaluation over {len(pairs)} test days written to {out_dir}")
    return {
        "status": "success",
        "splits": len(pairs),
        "utilities": [r.model_dump() for r in utilities.values()],
        "uplifts": [r.model_dump() for r in uplifts],
    }
