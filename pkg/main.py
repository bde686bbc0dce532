#!/usr/bin/env python3
"""
qudit-broadcast command line

Subcommands:
- sweep      classify broadcasting over a MEMS or TPCS parameter grid
- threshold  locate a parameter threshold by bisection
- survey     classify Haar-random inputs with the non-broadcastable predicate
- table      compare protocol output against the closed-form tables
- broadcast  run the protocol once on a state file

Exit codes: 0 success, 2 domain or validation error, 3 numerics error.
"""

import argparse
import json
import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Dict, List, Optional

import structlog

from config.exceptions import ConfigurationError
from config.loader import LayeredConfigLoader, handle_configuration_error
from config.models import BroadcastConfig
from qbroadcast import __version__
from qbroadcast.bloch import decompose
from qbroadcast.cloning import broadcast
from qbroadcast.criteria import (
    absolute_separability,
    combined_verdict,
    ph_criterion,
    pptes_detect,
    realignment_criterion,
)
from qbroadcast.exceptions import BroadcastError, NumericsError
from qbroadcast.export import (
    load_state_file,
    metadata,
    records_csv,
    records_json,
    survey_csv,
    survey_json,
    table_json,
    threshold_json,
    write_text,
)
from qbroadcast.measures import geometric_discord, l1_coherence
from qbroadcast.scan import (
    FAMILY_AXES,
    PREDICATES,
    TABLES,
    admissible,
    default_grid,
    locate_threshold,
    parse_grid,
    reproduce_table,
    survey,
    sweep,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICS = 3

LOG_FILE = "qudit-broadcast.log"

structlog.configure(
    processors=[
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        structlog.processors.UnicodeDecoder(),
        structlog.processors.JSONRenderer()
    ],
    context_class=dict,
    logger_factory=structlog.stdlib.LoggerFactory(),
    wrapper_class=structlog.stdlib.BoundLogger,
    cache_logger_on_first_use=True,
)

logger = structlog.get_logger()

_installed_handlers: List[logging.Handler] = []


def configure_logging(config: BroadcastConfig) -> None:
    """JSON lines to a rotating file under log_dir, warnings and above to stderr"""
    root_logger = logging.getLogger()
    for handler in _installed_handlers:
        root_logger.removeHandler(handler)
        handler.close()
    _installed_handlers.clear()

    log_dir = Path(config.log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)
    file_handler = RotatingFileHandler(log_dir / LOG_FILE, maxBytes=10*1024*1024, backupCount=5)
    stderr_handler = logging.StreamHandler(sys.stderr)
    stderr_handler.setLevel(logging.WARNING)

    for handler in (file_handler, stderr_handler):
        root_logger.addHandler(handler)
        _installed_handlers.append(handler)
    root_logger.setLevel(getattr(logging, config.log_level))


def _load_config() -> BroadcastConfig:
    """Load configuration from environment, .env and defaults"""
    try:
        loader = LayeredConfigLoader()
        validation_result = loader.validate_sources()
        if validation_result.errors:
            logger.warning("Configuration source validation warnings",
                           errors=validation_result.errors)
        return loader.load_config()

    except ConfigurationError as e:
        handle_configuration_error(e)
        raise

    except Exception as e:
        logger.error("Unexpected configuration error",
                     error=str(e),
                     error_type=type(e).__name__)
        raise ConfigurationError(f"Configuration loading failed: {e}")


def _parse_fixed(text: Optional[str]) -> Dict[str, float]:
    fixed: Dict[str, float] = {}
    for part in filter(None, (p.strip() for p in (text or "").split(";"))):
        name, _, raw = part.partition("=")
        fixed[name.strip()] = float(raw)
    return fixed


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qudit-broadcast",
        description="Broadcasting of entanglement, discord and coherence with Heisenberg cloners",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="classify a parameter grid")
    p.add_argument("--family", choices=sorted(FAMILY_AXES), required=True)
    p.add_argument("--grid", help="e.g. 'r=0:1:0.01' or 'alpha=0:0.5:0.05;gamma=0:1:0.05'")
    p.add_argument("--admissible-only", action="store_true", help="drop grid points outside the family domain")
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("threshold", help="locate a threshold by bisection")
    p.add_argument("--family", choices=sorted(FAMILY_AXES), required=True)
    p.add_argument("--predicate", choices=sorted(PREDICATES), required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--axis", help="parameter to bisect (default: first family axis)")
    p.add_argument("--fixed", help="other parameters, e.g. 'gamma=0.2'")
    p.add_argument("--out", default="-")

    p = sub.add_parser("survey", help="Haar-random survey of the non-broadcastable predicate")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--environment-dim", type=int, help="environment dimension of the induced measure")
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("table", help="check closed-form tables")
    p.add_argument("--which", choices=TABLES, required=True)
    p.add_argument("--step", type=float)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="-")

    p = sub.add_parser("broadcast", help="run the protocol on a state file")
    p.add_argument("--state", required=True)
    p.add_argument("--out", default="-")

    return parser


def _tolerances(config: BroadcastConfig) -> Dict[str, float]:
    return {
        "hermitian_tol": config.hermitian_tol,
        "trace_tol": config.trace_tol,
        "criteria_tol": config.criteria_tol,
        "discord_clamp_tol": config.discord_clamp_tol,
    }


def run_sweep(args, config: BroadcastConfig) -> None:
    grid = parse_grid(args.family, args.grid) if args.grid else default_grid(args.family)
    if args.admissible_only:
        grid = [p for p in grid if admissible(args.family, p)]
    records = sweep(args.family, grid, config.criteria_tol, config.discord_clamp_tol)
    digits = config.significant_digits
    if args.format == "csv":
        text = records_csv(args.family, records, digits)
    else:
        meta = metadata(family=args.family, grid=args.grid or "default", tolerances=_tolerances(config))
        text = records_json(args.family, records, meta, digits)
    write_text(text, args.out)


def run_threshold(args, config: BroadcastConfig) -> None:
    result = locate_threshold(
        args.family,
        args.predicate,
        (args.lo, args.hi),
        tol=args.tol,
        fixed=_parse_fixed(args.fixed),
        axis=args.axis,
        probes=config.monotonicity_probes,
        criteria_tol=config.criteria_tol,
    )
    write_text(threshold_json(result, metadata(tolerances=_tolerances(config))), args.out)


def run_survey(args, config: BroadcastConfig) -> None:
    seed = config.default_seed if args.seed is None else args.seed
    env = args.environment_dim or config.survey_environment_dim
    result = survey(args.samples, seed, args.dim, env)
    digits = config.significant_digits
    if args.format == "csv":
        text = survey_csv(result, digits)
    else:
        meta = metadata(
            seed=seed,
            samples=args.samples,
            dim=args.dim,
            ensemble=f"induced measure, environment dimension {env}",
            tolerances=_tolerances(config),
        )
        text = survey_json(result, meta, digits)
    write_text(text, args.out)


def run_table(args, config: BroadcastConfig) -> None:
    seed = config.default_seed if args.seed is None else args.seed
    report = reproduce_table(
        args.which,
        step=args.step,
        samples=args.samples,
        seed=seed,
        criteria_tol=config.criteria_tol,
        discord_clamp_tol=config.discord_clamp_tol,
    )
    write_text(table_json(report, metadata(seed=seed, tolerances=_tolerances(config))), args.out)


def run_broadcast(args, config: BroadcastConfig) -> None:
    rho = load_state_file(args.state, config.hermitian_tol, config.trace_tol, config.criteria_tol)
    outputs = broadcast(rho)
    tol = config.criteria_tol
    payload = {
        "metadata": metadata(state=str(args.state), tolerances=_tolerances(config)),
        "input_bloch": decompose(rho).as_dict(),
        "nonlocal_bloch": decompose(outputs.rho_14).as_dict(),
        "verdicts": {
            "rho_14": ph_criterion(outputs.rho_14, tol).model_dump(mode="json"),
            "rho_13": ph_criterion(outputs.rho_13, tol).model_dump(mode="json"),
            "rho_24": combined_verdict(outputs.rho_24, tol).model_dump(mode="json"),
            "rho_24_realignment": realignment_criterion(outputs.rho_24, tol).model_dump(mode="json"),
        },
        "pptes_bob": pptes_detect(outputs.rho_24, tol),
        "abs_sep_alice": absolute_separability(outputs.rho_13, tol),
        "measures": {
            name: {
                "discord": geometric_discord(rho_out, config.discord_clamp_tol).value,
                "coherence": l1_coherence(rho_out).value,
            }
            for name, rho_out in (("rho_14", outputs.rho_14), ("rho_13", outputs.rho_13))
        },
    }
    write_text(json.dumps(payload, indent=2) + "\n", args.out)


COMMANDS = {
    "sweep": run_sweep,
    "threshold": run_threshold,
    "survey": run_survey,
    "table": run_table,
    "broadcast": run_broadcast,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        config = _load_config()
    except ConfigurationError as e:
        sys.stderr.write(f"configuration error: {e}\n")
        return EXIT_INVALID

    configure_logging(config)
    logger.info("Command started", command=args.command, version=__version__)

    try:
        COMMANDS[args.command](args, config)
    except NumericsError as e:
        logger.error("Numerics error", parameter=e.parameter, reason=e.reason)
        sys.stderr.write(f"numerics error: {e}\n")
        return EXIT_NUMERICS
    except BroadcastError as e:
        logger.error("Invalid input", error_type=type(e).__name__, parameter=e.parameter, reason=e.reason)
        sys.stderr.write(f"{type(e).__name__}: {e}\n")
        return EXIT_INVALID
    except ValueError as e:
        logger.error("Invalid argument", error=str(e))
        sys.stderr.write(f"invalid argument: {e}\n")
        return EXIT_INVALID

    logger.info("Command completed", command=args.command)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
