"""Metric variants and report rows."""
import math
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.schemas.attribution import AttributionFunctionKind


class CostPerturbation(BaseModel):
    """Gamma perturbation of the observed cost; an infinite beta means no perturbation."""

    model_config = ConfigDict(frozen=True)

    beta: float = Field(math.inf, description="Gamma rate; math.inf disables the perturbation")

    @field_validator("beta", mode="before")
    @classmethod
    def _parse_beta(cls, value: Union[str, float, int]) -> float:
        if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "+inf"):
            return math.inf
        return float(value)

    @field_validator("beta")
    @classmethod
    def _positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("beta must be positive")
        return value

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.beta)

    @property
    def label(self) -> str:
        return "beta_inf" if self.is_infinite else f"beta_{self.beta:g}"


class MetricVariant(BaseModel):
    """One (attribution function, cost perturbation) cell of the utility grid."""

    model_config = ConfigDict(frozen=True)

    attribution: AttributionFunctionKind
    perturbation: CostPerturbation

    @property
    def name(self) -> str:
        return f"{self.attribution.metric_name}, {self.perturbation.label}"


class UtilityReport(BaseModel):
    """Utility of one bidder under one metric variant, with its bootstrap band."""

    bidder: str
    metric: str
    beta: str
    value: float
    n_auctions: int = Field(..., ge=0)
    win_rate: float = Field(..., ge=0, le=1)
    ci_low: float
    ci_high: float
    seed: int


class UpliftReport(BaseModel):
    """Relative uplift of a candidate bidder over a reference bidder under one metric variant."""

    candidate: str
    reference: str
    metric: str
    beta: str
    uplift: float
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    significant: bool
    seed: int
