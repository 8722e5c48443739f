"""Attribution schemes turned into conversion-model training labels."""

from .schemes import label_conversion_clicks, model_click_weights
from .training_set import build_training_set, dump_training_set

__all__ = ["build_training_set", "dump_training_set", "label_conversion_clicks", "model_click_weights"]
