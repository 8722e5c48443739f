"""Stage guard and run manifest shared by the pipeline commands."""
import hashlib
import json
import logging
from contextlib import contextmanager
from importlib import metadata
from pathlib import Path
from typing import Dict, Iterator, List, Optional

from app.core.config import settings
from app.core.exceptions import StageError
from app.schemas.experiment import ExperimentConfig

logger = logging.getLogger(__name__)

MANIFEST_PACKAGES = ("attribution-bidding", "numpy", "scipy", "pandas", "pydantic", "pydantic-settings")


@contextmanager
def stage(name: str, split_index: Optional[int] = None) -> Iterator[None]:
    """Tag any failure inside the block with the stage name and split index."""
    where = name if split_index is None else f"{name} (split {split_index})"
    logger.debug(f"Stage {where} started")
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        logger.error(f"Stage {where} failed: {e}")
        raise StageError(name, e, split_index=split_index) from e
    logger.debug(f"Stage {where} finished")


def package_versions() -> Dict[str, str]:
    versions = {}
    for package in MANIFEST_PACKAGES:
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = settings.VERSION if package == settings.SERVICE_NAME else "unknown"
    return versions


def config_digest(config: ExperimentConfig) -> str:
    return hashlib.sha256(config.canonical_json().encode("utf-8")).hexdigest()


def write_manifest(
    config: ExperimentConfig,
    out_dir: Path,
    command: str,
    artifacts: List[Path],
    seeds: Dict[str, int],
) -> Path:
    """manifest.json: command, config and its SHA-256, seeds, package versions and written artifacts."""
    manifest = {
        "command": command,
        "config_sha256": config_digest(config),
        "config": json.loads(config.canonical_json()),
        "seeds": seeds,
        "versions": package_versions(),
        "artifacts": sorted(str(p.relative_to(out_dir)) if p.is_relative_to(out_dir) else str(p) for p in artifacts),
    }
    path = out_dir / "manifest.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def run_seeds(config: ExperimentConfig) -> Dict[str, int]:
    """Every seed a run of ``config`` depends on."""
    seeds = {"bootstrap": config.bootstrap.seed}
    if config.input_log is None:
        seeds["rng_seed"] = config.synthetic.rng_seed if config.synthetic else settings.DEFAULT_SEED
    return seeds
