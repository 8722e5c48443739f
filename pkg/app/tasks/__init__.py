"""Pipeline commands behind the CLI."""
from app.tasks.evaluate import cmd_evaluate, evaluate_split, metric_variants
from app.tasks.fit_attribution import cmd_fit_attribution
from app.tasks.stages import stage, write_manifest
from app.tasks.synth import cmd_synth, load_records

__all__ = [
    "cmd_evaluate",
    "cmd_fit_attribution",
    "cmd_synth",
    "evaluate_split",
    "load_records",
    "metric_variants",
    "stage",
    "write_manifest",
]
