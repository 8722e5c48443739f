"""fit-attribution: global decay-rate fit with optional per-advertiser and daily studies."""
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from app.core.config import settings
from app.core.exceptions import InsufficientDataError
from app.schemas.attribution import AttributionModel
from app.schemas.experiment import ExperimentConfig
from app.schemas.records import ImpressionRecord
from app.services.attribution import (
    AdvertiserFits,
    DailyStability,
    daily_stability,
    fit_lambda,
    fit_per_advertiser,
    group_by_campaign,
    half_life,
    save_attribution_model,
)
from app.services.data import build_timelines, extract_attribution_samples
from app.services.metrics import conversion_attribution_curve, write_curve
from app.tasks.stages import run_seeds, stage, write_manifest
from app.tasks.synth import load_records

logger = logging.getLogger(__name__)


def advertiser_table(fits: AdvertiserFits, global_model: AttributionModel) -> pd.DataFrame:
    """One row per fitted campaign: lambda, sample count, convergence, boundary and ratio to the global rate."""
    rows = [
        {
            "campaign": campaign,
            "lambda": model.decay_rate,
            "n_samples": model.n_samples,
            "converged": model.converged,
            "boundary": model.boundary or "",
            "ratio_to_global": model.decay_rate / global_model.decay_rate if global_model.decay_rate > 0 else float("nan"),
        }
        for campaign, model in fits.models.items()
    ]
    columns = ["campaign", "lambda", "n_samples", "converged", "boundary", "ratio_to_global"]
    return pd.DataFrame(rows, columns=columns)


def daily_table(study: DailyStability) -> pd.DataFrame:
    rows = [
        {
            "day": d.day,
            "lambda": d.model.decay_rate,
            "n_samples": d.model.n_samples,
            "relative_deviation": d.relative_deviation,
            "flagged": d.day in study.flagged_days,
        }
        for d in study.days
    ]
    return pd.DataFrame(rows, columns=["day", "lambda", "n_samples", "relative_deviation", "flagged"])


def cmd_fit_attribution(
    config: ExperimentConfig,
    per_advertiser: bool = False,
    daily: bool = False,
    records: Optional[Sequence[ImpressionRecord]] = None,
) -> Dict[str, Any]:
    """Fit lambda on every conversion of the log and write the model document and study tables.

    Raises:
        StageError: wrapping InsufficientDataError when the log holds no attribution sample.
    """
    out_dir = config.output_dir
    records = list(records) if records is not None else load_records(config)
    fit = config.attribution
    fit_options = dict(
        tolerance=fit.tolerance, max_iter=fit.max_iter, lambda_min=fit.lambda_min, lambda_max=fit.lambda_max
    )
    written: List[Path] = []
    result: Dict[str, Any] = {"status": "success"}

    with stage("extract"):
        timelines = build_timelines(records)
        extracted = extract_attribution_samples(timelines, settings.attribution_window_seconds)
        if not extracted.samples:
            raise InsufficientDataError("no attribution samples: the log has no conversion preceded by a click")
    samples = extracted.samples
    cutoff = max(r.timestamp for r in records)

    with stage("fit"):
        model = fit_lambda(samples, fitted_at=cutoff, **fit_options)
        written.append(save_attribution_model(model, out_dir / "attribution_model.json"))
    logger.info(
        f"Global lambda={model.decay_rate:.6g}/s, half-life {half_life(model) / 86400:.2f} days, "
        f"{model.n_samples} samples, converged={model.converged}"
    )
    result["model"] = model.model_dump(by_alias=True)

    with stage("attribution-curve"):
        curve = conversion_attribution_curve(timelines, config.curves.attribution_bucket_width)
        written.append(write_curve(curve, out_dir / "curves" / "conversion_attribution.csv"))

    if per_advertiser:
        with stage("per-advertiser"):
            fits = fit_per_advertiser(group_by_campaign(samples), fit.min_samples, config.workers, **fit_options)
            table = advertiser_table(fits, model)
            path = out_dir / "per_advertiser.tsv"
            table.to_csv(path, sep="\t", index=False)
            written.append(path)
        result["per_advertiser"] = len(table)
        result["omitted_advertisers"] = fits.omitted

    if daily:
        with stage("daily"):
            study = daily_stability(samples, global_model=model, **fit_options)
            path = out_dir / "daily.tsv"
            daily_table(study).to_csv(path, sep="\t", index=False)
            written.append(path)
        result["max_daily_deviation"] = study.max_relative_deviation
        result["flagged_days"] = study.flagged_days

    write_manifest(config, out_dir, "fit-attribution", written, run_seeds(config))
    result["artifacts"] = [str(p) for p in written]
    return result
