"""Parameter sweeps: every combination runs as an isolated child experiment."""

from __future__ import annotations

import copy
import itertools
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ..errors import ConfigurationError
from .config import ExperimentConfig
from .io import write_csv, write_json

SUMMARY_KEYS = ("initial_l2", "final_l2", "max_l2", "blowup_time")


def combinations(parameters: dict) -> list[dict]:
    axes = sorted(parameters)
    return [dict(zip(axes, vals)) for vals in itertools.product(*(parameters[a] for a in axes))]


def child_raw(cfg: ExperimentConfig, combo: dict) -> dict:
    raw = copy.deepcopy(cfg.as_dict())
    raw["experiment"] = cfg.sweep.base
    raw.pop("sweep")
    # drop None-valued keys so the child re-validates from defaults
    for sec in ("grid", "time", "bc", "data", "boundary"):
        raw[sec] = {k: v for k, v in raw[sec].items() if v is not None}
    for axis, value in combo.items():
        section, key = axis.split(".", 1)
        if section == "top":
            raw[key] = value
        else:
            raw.setdefault(section, {})[key] = value
    return raw


def _child(args):
    from .main import execute  # imported here so worker processes resolve it after fork/spawn

    raw, out = args
    code, report, error = execute(raw, Path(out))
    return code, report, error


def classify(code: int, summary: dict) -> str:
    if code == 3:
        return "grew/guard-tripped"
    if code != 0:
        return "failed"
    a, b = summary.get("initial_l2"), summary.get("final_l2")
    if a is None or b is None:
        return "completed"
    return "decayed" if b < a else "grew/guard-tripped"


def decay_boundary(rows: list[dict], axis: str) -> dict:
    """Largest decayed and smallest grown value along ``axis`` and monotonicity."""
    pts = [(r[axis], r["classification"]) for r in rows if r["classification"] in ("decayed", "grew/guard-tripped")]
    try:
        pts.sort(key=lambda p: float(p[0]))
    except (TypeError, ValueError):
        return {"axis": axis, "numeric": False}
    labels = [c for _, c in pts]
    first_grow = next((i for i, c in enumerate(labels) if c != "decayed"), len(labels))
    monotone = all(c != "decayed" for c in labels[first_grow:])
    dec = [float(v) for v, c in pts if c == "decayed"]
    grew = [float(v) for v, c in pts if c != "decayed"]
    return {"axis": axis, "numeric": True, "monotone": monotone,
            "largest_decayed": max(dec) if dec else None, "smallest_grown": min(grew) if grew else None}


def run_sweep(cfg: ExperimentConfig, out: Path, jobs: int | None = None) -> dict:
    combos = combinations(cfg.sweep.parameters)
    if len(combos) > cfg.sweep.max_runs:
        raise ConfigurationError(f"sweep has {len(combos)} runs, above max_runs={cfg.sweep.max_runs}")
    jobs = int(jobs or cfg.sweep.jobs)
    tasks = [(child_raw(cfg, c), str(out / f"run_{i:04d}")) for i, c in enumerate(combos)]
    if jobs == 1:
        results = [_child(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_child, tasks))
    axes = sorted(cfg.sweep.parameters)
    rows = []
    for i, (combo, (code, report, error)) in enumerate(zip(combos, results)):
        summary = (report or {}).get("summary", {})
        row = {"run": f"run_{i:04d}", **combo, "exit_code": code,
               "status": "ok" if code == 0 else ("numerical_fault" if code == 3 else "failed"),
               "classification": classify(code, summary), "message": error or ""}
        for k in SUMMARY_KEYS:
            row[k] = summary.get(k)
        rows.append(row)
    cols = ["run", *axes, "status", "exit_code", "classification", *SUMMARY_KEYS, "message"]
    n_ok = sum(r["status"] == "ok" for r in rows)
    agg = {"run": "aggregate", "status": f"{n_ok}/{len(rows)} ok", "exit_code": "",
           "classification": "", "message": ""}
    write_csv(out / "sweep.csv", cols, [[r.get(c) for c in cols] for r in rows + [agg]])
    boundary = [decay_boundary(rows, a) for a in axes]
    report = {"summary": {"runs": len(rows), "ok": n_ok,
                          "failed": sum(r["status"] == "failed" for r in rows),
                          "numerical_faults": sum(r["status"] == "numerical_fault" for r in rows)},
              "decay_region": boundary,
              "checks": {"all_children_recorded": len(rows) == len(combos)}}
    write_json(out / "report.json", report)
    return report

