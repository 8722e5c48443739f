"""Experiment configuration documents (JSON)."""
import json
import math
from pathlib import Path
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.core.config import settings
from app.core.exceptions import ConfigError
from app.schemas.attribution import AttributionFunctionKind, SchemeKind
from app.schemas.bidding import BidderKind

# Canonical record field -> default column name (released-dataset naming).
DEFAULT_COLUMNS: Dict[str, str] = {
    "timestamp": "timestamp",
    "user_id": "uid",
    "campaign_id": "campaign",
    "cost": "cost",
    "cpo": "cpo",
    "click": "click",
    "click_pos": "click_pos",
    "click_nb": "click_nb",
    "conversion": "conversion",
    "conversion_timestamp": "conversion_timestamp",
    "conversion_value": "conversion_value",
    "attribution": "attribution",
}

REQUIRED_FIELDS = ("timestamp", "user_id", "campaign_id", "cost", "cpo", "click", "conversion", "attribution")


class LogSchema(BaseModel):
    """Mapping between record fields and delimited-log columns."""

    columns: Dict[str, str] = Field(default_factory=lambda: dict(DEFAULT_COLUMNS))
    feature_columns: Optional[List[str]] = Field(
        None, description="Categorical columns, in field-index order; default: every column starting with feature_prefix"
    )
    feature_prefix: str = "cat"
    delimiter: str = Field(default_factory=lambda: settings.LOG_DELIMITER)
    null_tokens: List[str] = Field(default_factory=lambda: [""])
    timestamp_scale: float = Field(1.0, gt=0, description="Multiplier turning logged time units into seconds")

    @field_validator("columns")
    @classmethod
    def _complete_columns(cls, value: Dict[str, str]) -> Dict[str, str]:
        unknown = set(value) - set(DEFAULT_COLUMNS)
        if unknown:
            raise ValueError(f"unknown record fields in column mapping: {sorted(unknown)}")
        merged = dict(DEFAULT_COLUMNS)
        merged.update(value)
        return merged


class SplitConfig(BaseModel):
    train_days: int = Field(default_factory=lambda: settings.TRAIN_DAYS, ge=1)
    test_days: int = Field(default_factory=lambda: settings.TEST_DAYS, ge=1)


class SyntheticWorldConfig(BaseModel):
    """Generative world with a known competitor click rate (the ground-truth lambda)."""

    n_users: int = Field(20000, ge=0)
    horizon: int = Field(30 * 86400, ge=0, description="Seconds of simulated traffic")
    impression_rate: float = Field(50 / (30 * 86400), ge=0, description="Per-user impressions per second")
    click_prob: float = Field(0.1, ge=0, le=1)
    conversion_prob_given_click: float = Field(0.1, ge=0, le=1)
    conversion_delay_rate: float = Field(1 / 86400, ge=0, description="Per-second rate of the exponential conversion delay")
    competitor_click_rate: float = Field(1e-5, ge=0, description="Ground-truth lambda per second")
    base_conversion_rate_per_feature: Dict[str, float] = Field(
        default_factory=lambda: {"f0_0": 2.0, "f0_1": 0.5, "f1_0": 1.5, "f2_3": 0.7}
    )
    rng_seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0, lt=2**64)

    n_campaigns: int = Field(1, ge=1)
    competitor_click_rates: Optional[List[float]] = Field(None, description="Per-campaign lambda overrides")
    rate_shift_day: Optional[int] = Field(None, ge=0, description="Conversion day from which the rate is multiplied")
    rate_shift_factor: float = Field(1.0, ge=0)
    n_feature_fields: int = Field(3, ge=1)
    tokens_per_field: int = Field(8, ge=1)
    cpo: float = Field(10.0, ge=0)
    cost_median: float = Field(0.3, gt=0)
    cost_sigma: float = Field(1.0, ge=0)
    conversion_value_median: float = Field(50.0, gt=0)
    conversion_value_sigma: float = Field(0.5, ge=0)
    attribution_window_days: int = Field(default_factory=lambda: settings.ATTRIBUTION_WINDOW_DAYS, ge=1)
    start_timestamp: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check_rates(self) -> "SyntheticWorldConfig":
        if self.competitor_click_rates is not None:
            if len(self.competitor_click_rates) != self.n_campaigns:
                raise ValueError("competitor_click_rates needs one rate per campaign")
            if any(rate < 0 for rate in self.competitor_click_rates):
                raise ValueError("competitor click rates must be non-negative")
        if any(effect < 0 for effect in self.base_conversion_rate_per_feature.values()):
            raise ValueError("feature effects must be non-negative")
        return self

    def campaign_rate(self, campaign_index: int) -> float:
        if self.competitor_click_rates is not None:
            return self.competitor_click_rates[campaign_index]
        return self.competitor_click_rate


class AttributionFitConfig(BaseModel):
    tolerance: float = Field(default_factory=lambda: settings.FIT_TOLERANCE, gt=0)
    max_iter: int = Field(default_factory=lambda: settings.FIT_MAX_ITER, ge=1)
    lambda_min: float = Field(default_factory=lambda: settings.LAMBDA_MIN, gt=0)
    lambda_max: float = Field(default_factory=lambda: settings.LAMBDA_MAX, gt=0)
    min_samples: int = Field(default_factory=lambda: settings.MIN_SAMPLES_PER_ADVERTISER, ge=1)
    model_path: Optional[Path] = Field(None, description="Use a saved model instead of fitting per split")


class TrainingConfig(BaseModel):
    hash_bits: int = Field(default_factory=lambda: settings.DEFAULT_HASH_BITS, ge=10, le=28)
    l2: float = Field(default_factory=lambda: settings.DEFAULT_L2, ge=0)
    max_iter: int = Field(default_factory=lambda: settings.LBFGS_MAX_ITER, ge=1)
    tolerance: float = Field(default_factory=lambda: settings.LBFGS_TOLERANCE, gt=0)
    recency_feature: bool = True
    labeling: Dict[BidderKind, SchemeKind] = Field(
        default_factory=dict, description="Overrides of each bidder's default training scheme"
    )

    def scheme_for(self, bidder: BidderKind) -> SchemeKind:
        return self.labeling.get(bidder, bidder.training_scheme)


class BootstrapConfig(BaseModel):
    n_resamples: int = Field(default_factory=lambda: settings.BOOTSTRAP_RESAMPLES, ge=2)
    quantile: float = Field(default_factory=lambda: settings.BOOTSTRAP_QUANTILE, gt=0, le=0.5)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0)


class CurveConfig(BaseModel):
    attribution_bucket_width: int = Field(6 * 3600, gt=0, description="Delay bucket for the attribution-rate curves")
    bid_bucket_width: int = Field(3600, gt=0, description="delta_c bucket for bid profiles")
    bid_horizon: int = Field(86400, gt=0, description="Post-click horizon of bid profiles")


class MultiplierConfig(BaseModel):
    a: float = Field(1.0, gt=0)
    b: float = Field(1.0, ge=0, le=1)
    equalize_spend: bool = Field(True, description="Solve A so the policy spends the reference total")


class ExperimentConfig(BaseModel):
    """Everything one pipeline run needs."""

    model_config = ConfigDict(populate_by_name=True)

    input_log: Optional[Path] = None
    synthetic: Optional[SyntheticWorldConfig] = None
    log_schema: LogSchema = Field(default_factory=LogSchema, alias="schema")
    split: SplitConfig = Field(default_factory=SplitConfig)
    attribution: AttributionFitConfig = Field(default_factory=AttributionFitConfig)
    training: TrainingConfig = Field(default_factory=TrainingConfig)
    bidders: List[BidderKind] = Field(default_factory=lambda: [BidderKind.LCB, BidderKind.FCB, BidderKind.AB])
    reference_bidder: BidderKind = BidderKind.LCB
    multiplier: MultiplierConfig = Field(default_factory=MultiplierConfig)
    betas: List[float] = Field(default_factory=lambda: [1000.0, math.inf])
    attribution_functions: List[AttributionFunctionKind] = Field(
        default_factory=lambda: [
            AttributionFunctionKind.MODEL_NORMALIZED,
            AttributionFunctionKind.MODEL,
            AttributionFunctionKind.LAST_CLICK,
        ]
    )
    value_column: str = Field("conversion_value", pattern="^(conversion_value|cpo)$")
    bootstrap: BootstrapConfig = Field(default_factory=BootstrapConfig)
    curves: CurveConfig = Field(default_factory=CurveConfig)
    output_dir: Path = Field(default_factory=lambda: Path(settings.OUTPUT_DIR))
    workers: int = Field(default_factory=lambda: settings.WORKERS, ge=1)

    @field_validator("betas", mode="before")
    @classmethod
    def _parse_betas(cls, value: List[Union[str, float]]) -> List[float]:
        parsed = []
        for beta in value:
            if isinstance(beta, str) and beta.strip().lower() in ("inf", "infinity"):
                parsed.append(math.inf)
            else:
                parsed.append(float(beta))
        return parsed

    @model_validator(mode="after")
    def _check_grid(self) -> "ExperimentConfig":
        if not self.bidders:
            raise ValueError("at least one bidder is required")
        if not self.attribution_functions or not self.betas:
            raise ValueError("at least one metric variant is required")
        if any(not beta > 0 for beta in self.betas):
            raise ValueError("betas must be positive")
        if len(set(self.bidders)) != len(self.bidders):
            raise ValueError("bidders must be unique")
        return self

    @property
    def effective_reference(self) -> BidderKind:
        """Bidder whose spend every other bidder is calibrated to."""
        return self.reference_bidder if self.reference_bidder in self.bidders else self.bidders[0]

    def canonical_json(self) -> str:
        """Stable JSON used for hashing and the run manifest."""
        return json.dumps(
            self.model_dump(mode="python", by_alias=True), sort_keys=True, separators=(",", ":"), default=str
        )

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}")
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        try:
            return cls.model_validate(raw)
        except ValidationError as e:
            first = e.errors()[0]
            location = ".".join(str(part) for part in first["loc"])
            raise ConfigError(f"invalid config field '{location}': {first['msg']}", details={"errors": e.errors()})
