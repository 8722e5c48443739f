"""synth: write a synthetic impression log."""
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from app.schemas.experiment import ExperimentConfig, SyntheticWorldConfig
from app.schemas.records import ImpressionRecord
from app.services.data import generate_synthetic_log, load_log, write_log
from app.tasks.stages import stage, write_manifest

logger = logging.getLogger(__name__)

SYNTHETIC_LOG_NAME = "synthetic_log.tsv"


def log_summary(records: List[ImpressionRecord]) -> Dict[str, int]:
    conversions = {(r.key, r.conversion_timestamp) for r in records if r.conversion}
    attributed = {(r.key, r.conversion_timestamp) for r in records if r.attribution}
    return {
        "impressions": len(records),
        "users": len({r.user_id for r in records}),
        "campaigns": len({r.campaign_id for r in records}),
        "clicks": sum(1 for r in records if r.click),
        "conversions": len(conversions),
        "attributed_conversions": len(attributed),
    }


def load_records(config: ExperimentConfig) -> List[ImpressionRecord]:
    """Records of the configured input log, or of the configured synthetic world."""
    if config.input_log is not None:
        with stage("load"):
            return load_log(config.input_log, config.log_schema)
    with stage("synth"):
        return generate_synthetic_log(config.synthetic or SyntheticWorldConfig())


def cmd_synth(config: ExperimentConfig, out_path: Optional[Path] = None) -> Dict[str, Any]:
    """Generate the configured world and write it as a delimited log.

    Returns:
        dict: log path and summary counts
    """
    world = config.synthetic or SyntheticWorldConfig()
    out_path = Path(out_path) if out_path is not None else config.output_dir / SYNTHETIC_LOG_NAME
    logger.info(f"Generating synthetic log: {world.n_users} users, seed {world.rng_seed}")

    with stage("synth"):
        records = generate_synthetic_log(world)
    with stage("write-log"):
        write_log(records, out_path, config.log_schema, n_feature_fields=world.n_feature_fields)
    write_manifest(config, out_path.parent, "synth", [out_path], {"rng_seed": world.rng_seed})

    summary = log_summary(records)
    logger.info(f"Synthetic log written to {out_path}: {summary}")
    return {"status": "success", "path": str(out_path), "summary": summary}
