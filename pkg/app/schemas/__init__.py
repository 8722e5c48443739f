"""Domain types and pydantic documents for the attribution bidding simulator."""
from app.schemas.attribution import (
    AttributionFunction,
    AttributionFunctionKind,
    AttributionModel,
    AttributionScheme,
    SchemeKind,
)
from app.schemas.bidding import BidContext, BidderKind, BidderSpec, BidTrace
from app.schemas.conversion import ConversionModelDocument, HashedFeatureVector, LinearConversionModel
from app.schemas.experiment import ExperimentConfig, LogSchema, SyntheticWorldConfig
from app.schemas.metrics import CostPerturbation, MetricVariant, UpliftReport, UtilityReport
from app.schemas.records import (
    AttributionSample,
    AttributionSampleSet,
    ConversionGroup,
    ImpressionRecord,
    LabeledClick,
    UserTimeline,
)

__all__ = [
    "AttributionFunction",
    "AttributionFunctionKind",
    "AttributionModel",
    "AttributionSample",
    "AttributionSampleSet",
    "AttributionScheme",
    "BidContext",
    "BidTrace",
    "BidderKind",
    "BidderSpec",
    "ConversionGroup",
    "ConversionModelDocument",
    "CostPerturbation",
    "ExperimentConfig",
    "HashedFeatureVector",
    "ImpressionRecord",
    "LabeledClick",
    "LinearConversionModel",
    "LogSchema",
    "MetricVariant",
    "SchemeKind",
    "SyntheticWorldConfig",
    "UpliftReport",
    "UserTimeline",
    "UtilityReport",
]
