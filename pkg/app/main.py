"""Attribution bidding simulator - command-line entry point."""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from app.core.config import settings
from app.core.exceptions import ConfigError, SimulatorError
from app.schemas.experiment import ExperimentConfig, SyntheticWorldConfig
from app.tasks import cmd_evaluate, cmd_fit_attribution, cmd_synth

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.SERVICE_NAME,
        description="Offline simulator for attribution-aware bidding: fit, replay and score bidders on impression logs.",
    )
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level (default: %(default)s)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, help="Experiment config (JSON)")
        p.add_argument("--seed", type=int, help="Override the generator and bootstrap seeds")
        p.add_argument("--out", type=Path, help="Output directory (synth: output log file)")

    synth = sub.add_parser("synth", help="Generate a synthetic impression log")
    common(synth)

    fit = sub.add_parser("fit-attribution", help="Fit the exponential attribution model")
    common(fit)
    fit.add_argument("--log", type=Path, help="Input log (overrides the config's input_log)")
    fit.add_argument("--per-advertiser", action="store_true", help="Also fit each campaign separately")
    fit.add_argument("--daily", action="store_true", help="Also fit each conversion day separately")

    evaluate = sub.add_parser("evaluate", help="Run the sliding-split bidder evaluation")
    common(evaluate)
    evaluate.add_argument("--log", type=Path, help="Input log (overrides the config's input_log)")
    evaluate.add_argument("--beta", action="append", help="Cost perturbation beta, repeatable ('inf' allowed)")
    evaluate.add_argument("--bidder", action="append", help="Bidder kind, repeatable (LCB, FCB, AB, MultiplierPolicy)")
    evaluate.add_argument(
        "--scheme", action="append", metavar="BIDDER=SCHEME", help="Training labeling override, repeatable"
    )
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file (or defaults) with the command-line overrides applied and re-validated."""
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    raw = config.model_dump(by_alias=True)

    if args.seed is not None:
        raw["synthetic"] = (raw.get("synthetic") or SyntheticWorldConfig().model_dump()) | {"rng_seed": args.seed}
        raw["bootstrap"]["seed"] = args.seed
    if args.out is not None and args.command != "synth":
        raw["output_dir"] = args.out
    if getattr(args, "log", None) is not None:
        raw["input_log"] = args.log
    if getattr(args, "beta", None):
        raw["betas"] = args.beta
    if getattr(args, "bidder", None):
        raw["bidders"] = args.bidder
    for override in getattr(args, "scheme", None) or []:
        bidder, sep, scheme = override.partition("=")
        if not sep:
            raise ConfigError(f"--scheme expects BIDDER=SCHEME, got {override!r}")
        raw["training"]["labeling"][bidder] = scheme
    return ExperimentConfig.from_dict(raw)


def run(argv: Optional[List[str]] = None) -> dict:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.INFO), format=settings.LOG_FORMAT)
    config = load_config(args)
    logger.info(f"Starting {settings.SERVICE_NAME} v{settings.VERSION}: {args.command}")

    if args.command == "synth":
        return cmd_synth(config, args.out)
    if args.command == "fit-attribution":
        return cmd_fit_attribution(config, per_advertiser=args.per_advertiser, daily=args.daily)
    return cmd_evaluate(config)


def main(argv: Optional[List[str]] = None) -> int:
    """Exit code 0 on success, 1 on a simulator error, 2 on anything unexpected."""
    try:
        result = run(argv)
    except SimulatorError as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.exception("Unexpected failure")
        print(f"unexpected error: {e}", file=sys.stderr)
        return 2
    print(json.dumps(result, indent=2, sort_keys=True, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
