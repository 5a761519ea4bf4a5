"""Experiment configuration: TOML file, validated before any computation."""

from __future__ import annotations

import copy
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..discretization.grid import MIN_NODES, BcVariant
from ..errors import ConfigurationError
from ..evolution.initial import FAMILIES

EXPERIMENTS = (
    "spectrum",
    "resolvent",
    "simulate-linear",
    "simulate-varcoef",
    "simulate-nonlinear",
    "energy-audit",
    "decay-fit",
    "forced-oscillation",
    "iteration-check",
    "contraction-audit",
    "mms-convergence",
    "sweep",
)
BOUNDARY_KINDS = ("zero", "periodic", "decaying", "general")
FLOWS = ("linear", "nonlinear")

# experiment-specific keys allowed in [params], with defaults
PARAMS: dict[str, dict[str, Any]] = {
    "spectrum": {"K": 20},
    "resolvent": {"omega_min": 1e2, "omega_max": 1e5, "n_omegas": 13, "include_fd": True},
    "simulate-linear": {"save_states": False},
    "simulate-varcoef": {"save_states": False, "a_amplitude": 0.1},
    "simulate-nonlinear": {"save_states": False},
    "energy-audit": {"levels": [128, 256, 512], "flow": "nonlinear", "dt_over_dx": 0.25},
    "decay-fit": {"flow": "linear", "t_from": 0.2},
    "forced-oscillation": {"max_iters": 50, "delta": 0.1, "return_periods": 3},
    "iteration-check": {"gamma": 0.5, "beta": 0.0, "y0": 1.0, "b": 0.1, "variant": "uniform_b",
                        "delta": 0.5, "c": 0.1, "n_max": 200},
    "contraction-audit": {"flow": "nonlinear"},
    "mms-convergence": {"levels": [64, 128, 256], "flows": ["linear", "nonlinear"], "dt_over_dx": 1.0},
    "sweep": {},
}


@dataclass
class GridSection:
    L: float = 1.0
    N: int = 128


@dataclass
class TimeSection:
    dt: Optional[float] = None
    T_end: float = 1.0
    window_T: float = 1.0
    store_every: Optional[int] = None
    startup_steps: int = 2


@dataclass
class BcSection:
    variant: str = "CG"


@dataclass
class DataSection:
    family: str = "eigenmode"
    amplitude: float = 1.0
    k: int = 1
    m: int = 1
    cutoff: int = 8
    center: float = 0.5
    width: float = 0.3


@dataclass
class BoundarySection:
    """h_j(t) = a_j * shape(t); shape is 1 (general), exp(-nu t) (decaying)
    or sin(2 pi t / tau) (periodic)."""

    kind: str = "zero"
    h1: float = 0.0
    h2: float = 0.0
    h3: float = 0.0
    tau: float = 1.0
    nu: float = 0.2


@dataclass
class SweepSection:
    base: str = "simulate-nonlinear"  # experiment run at every grid point
    parameters: dict = field(default_factory=dict)  # "section.key" -> list of values
    max_runs: int = 256
    jobs: int = 1


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int = 0
    output_dir: str = "out"
    grid: GridSection = field(default_factory=GridSection)
    time: TimeSection = field(default_factory=TimeSection)
    bc: BcSection = field(default_factory=BcSection)
    data: DataSection = field(default_factory=DataSection)
    boundary: BoundarySection = field(default_factory=BoundarySection)
    params: dict = field(default_factory=dict)
    sweep: SweepSection = field(default_factory=SweepSection)

    def as_dict(self) -> dict:
        return asdict(self)

    @property
    def bc_variant(self) -> BcVariant:
        return BcVariant.parse(self.bc.variant)


SECTIONS = {"grid": GridSection, "time": TimeSection, "bc": BcSection, "data": DataSection,
            "boundary": BoundarySection, "sweep": SweepSection}
TOP_KEYS = {"experiment", "seed", "output_dir"}


def _typed(section: str, key: str, value, default):
    kind = type(default)
    if default is None:
        if value is None or isinstance(value, (int, float)) and not isinstance(value, bool):
            return value
        raise ConfigurationError(f"[{section}] {key} must be a number")
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigurationError(f"[{section}] {key} must be true or false")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(f"[{section}] {key} must be an integer, got {value!r}")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigurationError(f"[{section}] {key} must be a number, got {value!r}")
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise ConfigurationError(f"[{section}] {key} must be a string")
        return value
    if kind is list:
        if not isinstance(value, list):
            raise ConfigurationError(f"[{section}] {key} must be a list")
        return value
    if kind is dict:
        if not isinstance(value, dict):
            raise ConfigurationError(f"[{section}] {key} must be a table")
        return value
    return value


def _section(name: str, cls, raw: dict):
    if not isinstance(raw, dict):
        raise ConfigurationError(f"[{name}] must be a table")
    inst = cls()
    known = {f.name for f in fields(cls)}
    for key, value in raw.items():
        if key not in known:
            raise ConfigurationError(f"unknown key {key!r} in [{name}]; allowed: {sorted(known)}")
        setattr(inst, key, _typed(name, key, value, getattr(inst, key)))
    return inst


def build_config(raw: dict, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Validate a parsed TOML mapping into an ExperimentConfig."""
    raw = copy.deepcopy(raw)
    for k, v in (overrides or {}).items():
        if v is not None:
            raw[k] = v
    unknown = set(raw) - TOP_KEYS - set(SECTIONS) - {"params"}
    if unknown:
        raise ConfigurationError(f"unknown top-level key(s) {sorted(unknown)}")
    exp = raw.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigurationError(f"experiment must be one of {EXPERIMENTS}, got {exp!r}")
    cfg = ExperimentConfig(experiment=exp)
    if "seed" in raw:
        cfg.seed = _typed("top", "seed", raw["seed"], 0)
    if "output_dir" in raw:
        cfg.output_dir = _typed("top", "output_dir", raw["output_dir"], "")
    for name, cls in SECTIONS.items():
        if name in raw:
            setattr(cfg, name, _section(name, cls, raw[name]))
    if exp == "sweep":
        base = cfg.sweep.base
        if base not in EXPERIMENTS or base == "sweep":
            raise ConfigurationError(f"[sweep] base must be a non-sweep experiment, got {base!r}")
    defaults = PARAMS[cfg.sweep.base if exp == "sweep" else exp]
    params = dict(defaults)
    for key, value in (raw.get("params") or {}).items():
        if key not in defaults:
            raise ConfigurationError(f"unknown key {key!r} in [params] for {exp}; allowed: {sorted(defaults)}")
        if key == "b" and isinstance(value, list):
            params[key] = [float(_typed("params", "b", v, 0.0)) for v in value]
        else:
            params[key] = _typed("params", key, value, defaults[key])
    cfg.params = params
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    g, t, d, b = cfg.grid, cfg.time, cfg.data, cfg.boundary
    if not g.L > 0:
        raise ConfigurationError(f"[grid] L must be positive, got {g.L}")
    if g.N < MIN_NODES:
        raise ConfigurationError(f"[grid] N={g.N} is below the stencil minimum N >= {MIN_NODES}")
    if t.dt is not None and not t.dt > 0:
        raise ConfigurationError("[time] dt must be positive")
    if not t.T_end > 0 or not t.window_T > 0:
        raise ConfigurationError("[time] T_end and window_T must be positive")
    if t.store_every is not None and t.store_every < 1:
        raise ConfigurationError("[time] store_every must be at least 1")
    if t.startup_steps < 0:
        raise ConfigurationError("[time] startup_steps must be nonnegative")
    BcVariant.parse(cfg.bc.variant)
    if d.family not in FAMILIES:
        raise ConfigurationError(f"[data] family must be one of {FAMILIES}, got {d.family!r}")
    if d.amplitude < 0:
        raise ConfigurationError("[data] amplitude must be nonnegative")
    if d.k < 1 or d.m < 1 or d.cutoff < 1:
        raise ConfigurationError("[data] k, m and cutoff must be at least 1")
    if b.kind not in BOUNDARY_KINDS:
        raise ConfigurationError(f"[boundary] kind must be one of {BOUNDARY_KINDS}, got {b.kind!r}")
    if b.kind == "periodic" and not b.tau > 0:
        raise ConfigurationError("[boundary] tau must be positive")
    if b.kind == "decaying" and not b.nu > 0:
        raise ConfigurationError("[boundary] nu must be positive")
    p = cfg.params
    for key in ("flow",):
        if key in p and p[key] not in FLOWS:
            raise ConfigurationError(f"[params] flow must be one of {FLOWS}")
    if "flows" in p and (not p["flows"] or any(f not in FLOWS for f in p["flows"])):
        raise ConfigurationError(f"[params] flows must be a nonempty subset of {FLOWS}")
    if "levels" in p:
        lv = p["levels"]
        if len(lv) < 2 or any(not isinstance(n, int) or n < MIN_NODES for n in lv):
            raise ConfigurationError(f"[params] levels needs at least two integers >= {MIN_NODES}")
    exp = cfg.sweep.base if cfg.experiment == "sweep" else cfg.experiment
    if exp == "spectrum" and p["K"] < 1:
        raise ConfigurationError("[params] K must be at least 1")
    if exp == "resolvent" and not (0 < p["omega_min"] < p["omega_max"] and p["n_omegas"] >= 3):
        raise ConfigurationError("[params] need 0 < omega_min < omega_max and n_omegas >= 3")
    if exp == "forced-oscillation":
        if b.kind not in ("periodic", "zero"):
            raise ConfigurationError("forced-oscillation needs [boundary] kind periodic or zero")
        if p["max_iters"] < 10:
            raise ConfigurationError("[params] max_iters must be at least 10")
    if exp == "iteration-check":
        if p["n_max"] < 1:
            raise ConfigurationError("[params] n_max must be at least 1")
        if p["variant"] not in ("uniform_b", "geometric_b"):
            raise ConfigurationError("[params] variant must be uniform_b or geometric_b")
    if cfg.experiment == "sweep":
        s = cfg.sweep
        if not s.parameters:
            raise ConfigurationError("[sweep] parameters must name at least one axis")
        for axis, values in s.parameters.items():
            if not isinstance(values, list) or not values:
                raise ConfigurationError(f"[sweep] axis {axis!r} needs a nonempty list of values")
            if "." not in axis:
                raise ConfigurationError(f"[sweep] axis {axis!r} must look like section.key")
        if s.jobs < 1 or s.max_runs < 1:
            raise ConfigurationError("[sweep] jobs and max_runs must be at least 1")


def load_config(path, overrides: Optional[dict] = None) -> ExperimentConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigurationError(f"config file {path} not found") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid TOML: {exc}") from exc
    return build_config(raw, overrides)
