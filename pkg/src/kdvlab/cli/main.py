"""Command-line entry point: ``kdvlab <experiment> --config FILE --out DIR``.

Exit status: 0 success, 2 validation error, 3 numerical fault.  Every run,
failed or not, leaves a manifest.json in the output directory.
"""

from __future__ import annotations

import argparse
import logging
import sys
import traceback
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from .. import __version__
from ..errors import ConfigurationError, NumericalFault
from .config import EXPERIMENTS, build_config, tomllib
from .io import SCHEMA_VERSION, inventory, write_json

EXIT_OK, EXIT_FAILURE, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2, 3
log = logging.getLogger("kdvlab")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def write_manifest(out: Path, config: Optional[dict], started: str, status: int, report: Optional[dict],
                   error: Optional[str]) -> Path:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "code_version": __version__,
        "config": config,
        "started": started,
        "finished": _now(),
        "exit_status": status,
        "error": error,
        "checks": (report or {}).get("checks", {}),
        "files": inventory(out),
    }
    return write_json(out / "manifest.json", manifest)


def execute(raw: dict, out: Optional[Path] = None, overrides: Optional[dict] = None, jobs: Optional[int] = None):
    """Validate ``raw``, run it and write the manifest.  Returns (status, report, error)."""
    started = _now()
    cfg = None
    report, error = None, None
    try:
        cfg = build_config(raw, overrides)
        out = Path(out or cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        rng = np.random.default_rng(cfg.seed)
        if cfg.experiment == "sweep":
            from .sweep import run_sweep

            report = run_sweep(cfg, out, jobs)
        else:
            from .experiments import RUNNERS

            report = RUNNERS[cfg.experiment](cfg, out, rng)
        status = EXIT_OK
    except ConfigurationError as exc:
        status, error = EXIT_INVALID, f"validation error: {exc}"
    except NumericalFault as exc:
        status, error = EXIT_NUMERICAL, f"numerical fault: {exc}"
    except Exception as exc:  # recorded, never swallowed silently
        status, error = EXIT_FAILURE, f"{type(exc).__name__}: {exc}"
        log.debug("%s", traceback.format_exc())
    out = Path(out or raw.get("output_dir") or "out")
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(out, cfg.as_dict() if cfg else raw, started, status, report, error)
    return status, report, error


def run_acceptance(numbers, out: Optional[Path]) -> int:
    from .. import acceptance

    started = _now()
    results = acceptance.run_all(numbers)
    for r in results:
        print(r.line())
    report = {"checks": {f"criterion_{r.number}": r.passed for r in results},
              "criteria": [r.as_dict() for r in results]}
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "acceptance.json", report)
        write_manifest(out, {"experiment": "acceptance", "criteria": [r.number for r in results]}, started,
                       EXIT_OK, report, None)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kdvlab", description="Numerical experiments for the KdV equation on a bounded interval.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="experiment", required=True, metavar="experiment")
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=Path, help="TOML experiment file")
        p.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
        p.add_argument("--seed", type=int, help="RNG seed (overrides the config)")
        p.add_argument("--jobs", type=int, help="worker processes for sweeps")
        p.add_argument("-v", "--verbose", action="store_true")
    p = sub.add_parser("acceptance", help="run the acceptance criteria and print PASS/FAIL lines")
    p.add_argument("--criteria", type=int, nargs="*", choices=range(1, 13), metavar="N")
    p.add_argument("--out", type=Path)
    p.add_argument("-v", "--verbose", action="store_true")
    return ap


def _read_raw(path: Path, experiment: str) -> dict:
    try:
        with Path(path).open("rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigurationError(f"config file {path} not found") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid TOML: {exc}") from exc
    if raw.setdefault("experiment", experiment) != experiment:
        raise ConfigurationError(f"config names experiment {raw['experiment']!r} but the command is {experiment!r}")
    return raw


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.experiment == "acceptance":
        return run_acceptance(args.criteria or None, args.out)
    raw: dict = {"experiment": args.experiment}
    if args.config is not None:
        try:
            raw = _read_raw(args.config, args.experiment)
        except ConfigurationError as exc:
            out = args.out or Path("out")
            out.mkdir(parents=True, exist_ok=True)
            msg = f"validation error: {exc}"
            write_manifest(out, None, _now(), EXIT_INVALID, None, msg)
            print(msg, file=sys.stderr)
            return EXIT_INVALID
    status, report, error = execute(raw, args.out, {"seed": args.seed}, args.jobs)
    if error:
        print(error, file=sys.stderr)
    elif report is not None:
        for name, ok in report.get("checks", {}).items():
            print(f"{'PASS' if ok else 'FAIL'} {name}")
    return status


if __name__ == "__main__":
    sys.exit(main())
