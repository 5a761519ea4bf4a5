from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from kdvlab.cli.config import build_config, load_config
from kdvlab.cli.io import fmt, inventory, verify_inventory, write_json
from kdvlab.cli.main import EXIT_INVALID, EXIT_OK, execute, main
from kdvlab.cli.sweep import combinations, decay_boundary
from kdvlab.errors import ConfigurationError


def _rows(path: Path) -> list[dict]:
    with path.open() as fh:
        return list(csv.DictReader(fh))


def _write(tmp_path: Path, text: str) -> Path:
    p = tmp_path / "cfg.toml"
    p.write_text(text)
    return p


# configuration


def test_defaults_validate():
    cfg = build_config({"experiment": "simulate-linear"})
    assert cfg.grid.N == 128 and cfg.bc.variant == "CG"
    assert cfg.params == {"save_states": False}


def test_small_grid_rejected_before_computation(tmp_path):
    with pytest.raises(ConfigurationError, match="N=4"):
        build_config({"experiment": "simulate-linear", "grid": {"N": 4}})
    cfg = _write(tmp_path, 'experiment = "simulate-linear"\n[grid]\nN = 4\n')
    out = tmp_path / "out"
    assert main(["simulate-linear", "--config", str(cfg), "--out", str(out)]) == EXIT_INVALID
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["exit_status"] == EXIT_INVALID
    assert "stencil minimum" in manifest["error"]
    assert not (out / "series.csv").exists()


@pytest.mark.parametrize("raw, needle", [
    ({"experiment": "simulate-linear", "grid": {"Nx": 64}}, "unknown key 'Nx'"),
    ({"experiment": "simulate-linear", "colour": 1}, "unknown top-level"),
    ({"experiment": "spectrum", "params": {"k": 3}}, "unknown key 'k' in \\[params\\]"),
    ({"experiment": "simulate-linear", "grid": {"N": 64.5}}, "integer"),
    ({"experiment": "simulate-linear", "bc": {"variant": "Neumann"}}, "variant"),
    ({"experiment": "simulate-linear", "data": {"family": "spiky"}}, "family"),
    ({"experiment": "no-such"}, "experiment must be one of"),
    ({"experiment": "forced-oscillation", "boundary": {"kind": "general"}}, "periodic or zero"),
    ({"experiment": "sweep", "sweep": {"parameters": {}}}, "at least one axis"),
])
def test_invalid_configs(raw, needle):
    with pytest.raises(ConfigurationError, match=needle):
        build_config(raw)


def test_bad_toml_and_missing_file(tmp_path):
    with pytest.raises(ConfigurationError, match="not valid TOML"):
        load_config(_write(tmp_path, "experiment = \n"))
    with pytest.raises(ConfigurationError, match="not found"):
        load_config(tmp_path / "absent.toml")


def test_mismatched_experiment_exits_invalid(tmp_path):
    cfg = _write(tmp_path, 'experiment = "spectrum"\n')
    assert main(["resolvent", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_INVALID


def test_seed_override():
    assert build_config({"experiment": "spectrum", "seed": 3}, {"seed": 9}).seed == 9
    assert build_config({"experiment": "spectrum", "seed": 3}, {"seed": None}).seed == 3


# io


def test_fmt_round_trips_floats():
    for v in (0.1, 1 / 3, -2.5e-300, 6.680213359):
        assert float(fmt(v)) == v
    assert fmt(np.float32(0.5)) == "0.5"
    assert fmt(True) == "true" and fmt(None) == "" and fmt(float("nan")) == "nan"
    assert fmt(np.int64(7)) == "7"


def test_json_is_atomic_and_sorted(tmp_path):
    p = write_json(tmp_path / "a.json", {"b": np.arange(3), "a": np.float64(np.inf), "c": 2j})
    assert list((tmp_path).iterdir()) == [p]
    data = json.loads(p.read_text())
    assert list(data) == ["a", "b", "c"]
    assert data["b"] == [0, 1, 2] and data["a"] == "inf" and data["c"] == {"re": 0.0, "im": 2.0}


def test_inventory_detects_tampering(tmp_path):
    (tmp_path / "x.csv").write_text("a\n1\n")
    (tmp_path / "sub").mkdir()
    (tmp_path / "sub" / "y.csv").write_text("b\n")
    manifest = {"files": inventory(tmp_path)}
    assert [f["path"] for f in manifest["files"]] == ["sub/y.csv", "x.csv"]
    assert verify_inventory(tmp_path, manifest) == []
    (tmp_path / "x.csv").write_text("a\n2\n")
    assert verify_inventory(tmp_path, manifest) == ["x.csv"]


# experiments


def test_spectrum_experiment(tmp_path):
    code, report, err = execute({"experiment": "spectrum"}, tmp_path)
    assert code == EXIT_OK and err is None
    rows = _rows(tmp_path / "eigenvalues.csv")
    assert len(rows) == 20
    assert all(float(r["re"]) < 0 for r in rows)
    assert all(report["checks"].values())
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["exit_status"] == 0 and manifest["config"]["experiment"] == "spectrum"
    assert verify_inventory(tmp_path, manifest) == []
    assert {"eigenvalues.csv", "report.json"} <= {f["path"] for f in manifest["files"]}


def test_reruns_are_byte_identical(tmp_path):
    raw = {"experiment": "simulate-nonlinear", "seed": 5, "grid": {"N": 32}, "time": {"T_end": 0.2},
           "data": {"family": "random_smooth", "amplitude": 0.5}, "params": {"save_states": True}}
    a, b = tmp_path / "a", tmp_path / "b"
    assert execute(raw, a)[0] == EXIT_OK
    assert execute(raw, b)[0] == EXIT_OK
    for name in ("series.csv", "states.csv", "report.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


@pytest.mark.parametrize("experiment", ["simulate-linear", "simulate-varcoef", "decay-fit", "iteration-check",
                                        "contraction-audit", "forced-oscillation"])
def test_experiments_run(tmp_path, experiment):
    raw = {"experiment": experiment, "grid": {"N": 32}, "time": {"T_end": 1.0, "window_T": 0.25}}
    code, report, err = execute(raw, tmp_path)
    assert code == EXIT_OK, err
    assert (tmp_path / "report.json").exists() and (tmp_path / "manifest.json").exists()


def test_iteration_check_reports_stated_and_corrected(tmp_path, capsys):
    cfg = _write(tmp_path, 'experiment = "iteration-check"\n[params]\ngamma = 0.5\nbeta = 1.0\ny0 = 0.05\nb = 0.02\n')
    assert main(["iteration-check", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "FAIL stated_bound_holds" in out and "PASS corrected_bound_holds" in out


# sweeps


def test_combinations_are_sorted_product():
    assert combinations({"b.x": [1, 2], "a.y": [3]}) == [{"a.y": 3, "b.x": 1}, {"a.y": 3, "b.x": 2}]


def test_decay_boundary_monotone_flag():
    rows = [{"a": v, "classification": c} for v, c in
            [(1, "decayed"), (3, "grew/guard-tripped"), (2, "decayed")]]
    assert decay_boundary(rows, "a") == {"axis": "a", "numeric": True, "monotone": True,
                                         "largest_decayed": 2.0, "smallest_grown": 3.0}
    rows.append({"a": 4, "classification": "decayed"})
    assert not decay_boundary(rows, "a")["monotone"]


def _sweep(tmp_path, params, base="simulate-nonlinear", jobs=1):
    raw = {"experiment": "sweep", "grid": {"N": 32}, "time": {"T_end": 0.5},
           "sweep": {"base": base, "parameters": params, "jobs": jobs}}
    code, report, err = execute(raw, tmp_path)
    assert code == EXIT_OK, err
    return report, _rows(tmp_path / "sweep.csv")


def test_single_point_sweep(tmp_path):
    report, rows = _sweep(tmp_path, {"data.amplitude": [0.1]})
    assert [r["run"] for r in rows] == ["run_0000", "aggregate"]
    assert rows[-1]["status"] == "1/1 ok"
    assert (tmp_path / "run_0000" / "manifest.json").exists()


def test_invalid_point_is_isolated(tmp_path):
    report, rows = _sweep(tmp_path, {"grid.N": [4, 32, 48]})
    status = {r["grid.N"]: r["status"] for r in rows[:-1]}
    assert status == {"4": "failed", "32": "ok", "48": "ok"}
    assert "stencil minimum" in rows[0]["message"]
    assert report["summary"] == {"runs": 3, "ok": 2, "failed": 1, "numerical_faults": 0}
    child = json.loads((tmp_path / "run_0000" / "manifest.json").read_text())
    assert child["exit_status"] == EXIT_INVALID


def test_amplitude_sweep_decay_region_is_monotone(tmp_path):
    report, rows = _sweep(tmp_path, {"data.amplitude": [0.01, 0.1, 1.0, 5.0]})
    region = report["decay_region"][0]
    assert region["axis"] == "data.amplitude" and region["monotone"]
    assert all(r["classification"] == "decayed" for r in rows[:3])


def test_parallel_sweep_matches_serial(tmp_path):
    params = {"data.amplitude": [0.1, 1.0], "bc.variant": ["CG", "Dirichlet"]}
    _sweep(tmp_path / "s", params, jobs=1)
    _sweep(tmp_path / "p", params, jobs=2)
    assert (tmp_path / "s" / "sweep.csv").read_bytes() == (tmp_path / "p" / "sweep.csv").read_bytes()


def test_too_many_runs_rejected(tmp_path):
    raw = {"experiment": "sweep", "sweep": {"parameters": {"data.amplitude": list(range(5))}, "max_runs": 4}}
    code, _, err = execute(raw, tmp_path)
    assert code == EXIT_INVALID and "max_runs" in err
