"""Command-line entry point: `spcart {fit,compare,bounds,synth} [flags]`."""

from __future__ import annotations

import argparse
import sys
import uuid
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from dotenv import dotenv_values
from loguru import logger
from pydantic import ValidationError

from spcart import __version__
from spcart.commands.bounds import cmd_bounds
from spcart.commands.compare import cmd_compare
from spcart.commands.fit import cmd_fit
from spcart.commands.synth import cmd_synth
from spcart.core.config import get_settings
from spcart.core.errors import ArgumentError, SpcartError
from spcart.core.logging import setup_logging
from spcart.models.config import Command, RunConfig
from spcart.models.report import ErrorRecord

HANDLERS = {
    Command.FIT: cmd_fit,
    Command.COMPARE: cmd_compare,
    Command.BOUNDS: cmd_bounds,
    Command.SYNTH: cmd_synth,
}

# RunConfig field -> long flag
FLAGS = {
    "input": "--input",
    "input_kind": "--input-kind",
    "method": "--method",
    "methods": "--methods",
    "trunc": "--trunc",
    "lam": "--lambda",
    "lambdas": "--lambdas",
    "r": "--r",
    "adaptive": "--adaptive",
    "seed": "--seed",
    "restarts": "--restarts",
    "max_iterations": "--max-iter",
    "tol": "--tol",
    "output": "--output",
    "fmt": "--format",
    "center": "--center",
    "remove_dc": "--remove-dc",
    "literal_artificial": "--literal-artificial",
    "trials": "--trials",
    "n": "--n",
    "workers": "--workers",
}
FIELDS = {flag.lstrip("-").replace("-", "_"): field for field, flag in FLAGS.items()}
LIST_FIELDS = {"methods", "lambdas"}


class _Parser(argparse.ArgumentParser):
    """Reports parse failures as ArgumentError instead of exiting."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ArgumentError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value file; keys are long flag names")
    common.add_argument("--input", help="pitprops, synthetic, or a CSV path")
    common.add_argument("--input-kind", dest="input_kind", help="data or covariance")
    common.add_argument("--method", help="spcart, rsvd-gp, rsvd-gpb, st or pca")
    common.add_argument("--methods", help="comma-separated methods (compare)")
    common.add_argument("--trunc", help="l0, l1, sp or en")
    common.add_argument("--lambda", dest="lam", help="number, or 1/sqrt(p) for l0/l1")
    common.add_argument("--lambdas", help="comma-separated lambda tokens (compare)")
    common.add_argument("--r", help="number of loadings")
    common.add_argument("--adaptive", action=argparse.BooleanOptionalAction, default=None)
    common.add_argument("--seed")
    common.add_argument("--restarts")
    common.add_argument("--max-iter", dest="max_iterations")
    common.add_argument("--tol")
    common.add_argument("--output", help="output directory (default SPCART_OUTPUT_DIR)")
    common.add_argument("--format", dest="fmt", help="csv or jsonl")
    common.add_argument("--center", action=argparse.BooleanOptionalAction, default=None)
    common.add_argument("--remove-dc", dest="remove_dc", action="store_true", default=None)
    common.add_argument("--literal-artificial", dest="literal_artificial", action="store_true", default=None)
    common.add_argument("--trials", help="Monte-Carlo trials (bounds)")
    common.add_argument("--n", help="samples to draw (synth)")
    common.add_argument("--workers")
    common.add_argument("--log-level", dest="log_level")

    parser = _Parser(prog="spcart", description="Sparse PCA by rotation and truncation")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{fit,compare,bounds,synth}")
    for command in Command:
        sub.add_parser(command.value, parents=[common], help=f"{command.value} command")
    return parser


def _split(value: Any) -> Any:
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return value


def _read_config_file(path: Path) -> Dict[str, Any]:
    if not path.is_file():
        raise ArgumentError(f"config file {path} not found", flag="--config", domain="existing file")
    values: Dict[str, Any] = {}
    for key, value in dotenv_values(path).items():
        name = key.strip().lower().replace("-", "_")
        field = FIELDS.get(name)
        if field is None and name in FLAGS:
            field = name
        if field is None:
            raise ArgumentError(f"unknown key '{key}' in {path}", flag="--config",
                                domain=", ".join(f.lstrip("-") for f in FLAGS.values()))
        if value is not None:
            values[field] = value
    return values


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Defaults < environment settings < config file < flags."""
    settings = get_settings()
    merged: Dict[str, Any] = {
        "max_iterations": settings.max_iterations,
        "tol": settings.rel_change_tol,
        "workers": settings.workers,
    }
    if args.config is not None:
        merged.update(_read_config_file(args.config))
    merged.update({field: getattr(args, field) for field in FLAGS if getattr(args, field) is not None})
    for field in LIST_FIELDS & merged.keys():
        merged[field] = _split(merged[field])
    return RunConfig(command=args.command, **merged)


def _validation_error(exc: ValidationError) -> ArgumentError:
    err = exc.errors()[0]
    loc = [str(part) for part in err.get("loc", ()) if not isinstance(part, int)]
    field = loc[0] if loc else "lam"
    msg = err.get("msg", str(exc))
    ctx = err.get("ctx") or {}
    domain = ctx.get("expected") or ", ".join(f"{k} {v}" for k, v in ctx.items() if k != "error") or None
    return ArgumentError(msg, flag=FLAGS.get(field, field), domain=domain)


def _report_error(exc: SpcartError, run_id: str) -> int:
    record = ErrorRecord(error=exc.kind, message=exc.message, flag=exc.flag, domain=exc.domain, run_id=run_id)
    sys.stderr.write(record.model_dump_json() + "\n")
    logger.error(f"[{run_id}] {exc}")
    return exc.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns the process exit code."""
    run_id = uuid.uuid4().hex[:8]
    argv = list(sys.argv[1:] if argv is None else argv)
    logging_ready = False
    try:
        args = build_parser().parse_args(argv)
        setup_logging(args.log_level)
        logging_ready = True
        try:
            cfg = build_run_config(args)
        except ValidationError as exc:
            raise _validation_error(exc) from None
        paths: List[Path] = HANDLERS[cfg.command](cfg, run_id)
        for path in paths:
            print(path)
        return 0
    except SpcartError as exc:
        if not logging_ready:
            setup_logging()
        return _report_error(exc, run_id)
    except ValidationError as exc:
        return _report_error(_validation_error(exc), run_id)
    except Exception as exc:
        logger.exception(f"[{run_id}] unexpected error: {exc}")
        record = ErrorRecord(error="internal", message=str(exc), run_id=run_id)
        sys.stderr.write(record.model_dump_json() + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
