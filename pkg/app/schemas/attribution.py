"""Attribution model document, labeling schemes and metric attribution functions."""
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class AttributionModel(BaseModel):
    """Exponential-decay attribution model: P(attributed | conversion, delay) = exp(-lambda * delay)."""

    model_config = ConfigDict(frozen=True, populate_by_name=True, ser_json_inf_nan="constants")

    decay_rate: float = Field(..., ge=0, alias="lambda", description="Decay rate per second")
    n_samples: int = Field(0, ge=0, description="Number of samples used in the fit")
    final_nllh: float = Field(0.0, description="Negative log-likelihood at the fitted rate")
    converged: bool = Field(True, description="Whether the optimizer met its tolerance")
    boundary: Optional[str] = Field(None, description="Boundary flag when the optimum sits at a bracket end")
    model_family: str = Field("exponential", description="Survival family of the model")
    campaign_id: Optional[str] = Field(None, description="Campaign for per-advertiser fits")
    fitted_at: Optional[int] = Field(None, description="Data cutoff (last log timestamp) of the fit")


class SchemeKind(str, Enum):
    """Training-label attribution schemes."""

    LAST_CLICK = "LastClick"
    FIRST_CLICK = "FirstClick"
    UNIFORM = "Uniform"
    ALL_CLICKS = "AllClicks"
    ATTRIBUTION_MODEL = "AttributionModelWeights"


class AttributionScheme(BaseModel):
    """How a conversion's credit is split over the clicks preceding it."""

    model_config = ConfigDict(frozen=True)

    kind: SchemeKind
    normalized: bool = False
    model: Optional[AttributionModel] = None

    @model_validator(mode="after")
    def _model_iff_attribution_weights(self) -> "AttributionScheme":
        if (self.model is not None) != (self.kind == SchemeKind.ATTRIBUTION_MODEL):
            raise ValueError("model is required for AttributionModelWeights and only for it")
        return self


class AttributionFunctionKind(str, Enum):
    """Per-display attribution functions of the attribution-aware utility."""

    LAST_CLICK = "LastClick"
    MODEL = "Model"
    MODEL_NORMALIZED = "ModelNormalized"

    @property
    def metric_name(self) -> str:
        return {
            AttributionFunctionKind.LAST_CLICK: "U_LC",
            AttributionFunctionKind.MODEL: "U_A*",
            AttributionFunctionKind.MODEL_NORMALIZED: "U_A",
        }[self]


class AttributionFunction(BaseModel):
    """Attribution function a(x) weighting each display in the utility."""

    model_config = ConfigDict(frozen=True)

    kind: AttributionFunctionKind
    model: Optional[AttributionModel] = None

    @model_validator(mode="after")
    def _model_iff_model_kind(self) -> "AttributionFunction":
        if (self.model is not None) != (self.kind != AttributionFunctionKind.LAST_CLICK):
            raise ValueError("model is required for Model kinds and only for them")
        return self
