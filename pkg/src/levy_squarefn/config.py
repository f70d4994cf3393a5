"""Run configuration: TOML parsing, validation and round-tripping.

A single structured-text file drives batch runs.  Every report embeds
the resolved configuration, so a run is reproducible from its output
alone.  The serializer below writes the same subset of TOML that the
parser accepts, and load(dump(cfg)) == cfg.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:            # pragma: no cover - python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .models import LevyMeasureModel
from .spectral import Grid

__all__ = ["RunConfig", "load_config", "loads_config", "dumps_config",
           "default_config_text", "KNOWN_SUITES"]

KNOWN_SUITES = ("symbol", "density", "hardy-stein", "square-fn",
                "multiplier", "mc", "all")

_DEFAULTS = {
    "model": {"kind": "isotropic-stable", "d": 1, "alpha": 1.0},
    "grid": {"d": 1, "N": 512, "L": 16.0},
    "jump_quadrature": {"eps": 1e-6, "i0": 4, "n_per_octave": 8,
                        "n_angular": 16},
    "time_quadrature": {"t_min": 1e-4, "t_max": "auto",
                        "nodes_per_decade": 24},
    "family": {"centers": [-6.0, -4.0, -2.0, -0.5, 0.5, 2.0, 4.0, 6.0],
               "widths": [1.0, 0.7, 1.3, 0.9, 1.1, 0.8, 1.2, 1.0],
               "signs": [1, -1, 1, 1, -1, 1, -1, 1]},
    "mc": {"eps": 0.05, "T": 1.0, "n": 2000, "seed": 2024, "z_stride": 32},
    "run": {"suites": ["all"], "out_dir": "reports", "seed": 12345},
    "tolerances": {},
}


@dataclass(frozen=True)
class RunConfig:
    """Validated, fully resolved batch-run parameters."""

    model: LevyMeasureModel
    grid: Grid
    jump_quadrature: dict
    time_quadrature: dict
    family: dict
    mc: dict
    suites: tuple
    out_dir: str
    seed: int
    tolerances: dict = field(default_factory=dict)

    def tol(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))

    def as_dict(self) -> dict:
        """Plain-dict view, suitable for embedding in reports."""
        model = {"kind": self.model.kind, "d": self.model.d}
        if self.model.alpha is not None:
            model["alpha"] = self.model.alpha
        if self.model.kind == "tempered-stable":
            model["lam"] = self.model.lam
        if self.model.kind == "truncated-stable":
            model["R"] = self.model.R
        if self.model.kind == "compound-poisson":
            model["atoms"] = [[list(loc), m] for loc, m in self.model.atoms]
        return {
            "model": model,
            "grid": {"d": self.grid.d, "N": self.grid.N, "L": self.grid.L},
            "jump_quadrature": dict(self.jump_quadrature),
            "time_quadrature": dict(self.time_quadrature),
            "family": {k: list(v) for k, v in self.family.items()},
            "mc": dict(self.mc),
            "run": {"suites": list(self.suites), "out_dir": self.out_dir,
                    "seed": self.seed},
            "tolerances": dict(self.tolerances),
        }


def _merged(raw: dict) -> dict:
    out = {}
    for section, defaults in _DEFAULTS.items():
        block = dict(defaults)
        extra = raw.get(section, {})
        if not isinstance(extra, dict):
            raise ConfigError(f"[{section}] must be a table", field=section)
        block.update(extra)
        out[section] = block
    for key in raw:
        if key not in _DEFAULTS:
            raise ConfigError(f"unknown section [{key}]", field=key)
    return out


def _build_model(block: dict) -> LevyMeasureModel:
    kind = block.get("kind")
    kwargs = {"kind": kind, "d": int(block.get("d", 1))}
    for name in ("alpha", "lam", "R"):
        if name in block:
            kwargs[name] = float(block[name])
    if "atoms" in block:
        kwargs["atoms"] = tuple((tuple(loc), float(m))
                                for loc, m in block["atoms"])
    try:
        return LevyMeasureModel(**kwargs)
    except Exception as exc:
        raise ConfigError(f"model: {exc}", field="model") from exc


def loads_config(text: str) -> RunConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    blocks = _merged(raw)
    model = _build_model(blocks["model"])
    gb = blocks["grid"]
    try:
        grid = Grid(d=int(gb["d"]), N=int(gb["N"]), L=float(gb["L"]))
    except Exception as exc:
        raise ConfigError(f"grid: {exc}", field="grid") from exc
    if grid.d != model.d:
        raise ConfigError("grid.d must match model.d", field="grid.d")

    tq = blocks["time_quadrature"]
    if tq["t_max"] != "auto" and float(tq["t_max"]) <= float(tq["t_min"]):
        raise ConfigError("time_quadrature.t_max must exceed t_min",
                          field="time_quadrature.t_max")
    fam = blocks["family"]
    n = len(fam["centers"])
    if not (len(fam["widths"]) == len(fam["signs"]) == n) or n == 0:
        raise ConfigError("family lists must be equal-length and non-empty",
                          field="family")
    if any(w <= 0 for w in fam["widths"]):
        raise ConfigError("family.widths must be positive",
                          field="family.widths")
    mc = blocks["mc"]
    if mc["eps"] <= 0 or mc["T"] <= 0 or int(mc["n"]) < 1000:
        raise ConfigError("mc block needs eps > 0, T > 0, n >= 1000",
                          field="mc")
    run = blocks["run"]
    suites = tuple(run["suites"])
    for s in suites:
        if s not in KNOWN_SUITES:
            raise ConfigError(f"unknown suite {s!r}", field="run.suites")
    tols = blocks["tolerances"]
    for k, v in tols.items():
        if not (isinstance(v, (int, float)) and v > 0):
            raise ConfigError(f"tolerance {k!r} must be positive",
                              field=f"tolerances.{k}")
    return RunConfig(
        model=model, grid=grid,
        jump_quadrature=dict(blocks["jump_quadrature"]),
        time_quadrature=dict(tq),
        family={k: list(fam[k]) for k in ("centers", "widths", "signs")},
        mc={"eps": float(mc["eps"]), "T": float(mc["T"]),
            "n": int(mc["n"]), "seed": int(mc["seed"]),
            "z_stride": int(mc["z_stride"])},
        suites=suites, out_dir=str(run["out_dir"]), seed=int(run["seed"]),
        tolerances=dict(tols))


def load_config(path: str) -> RunConfig:
    with open(path) as fh:
        return loads_config(fh.read())


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        if isinstance(v, float) and (math.isinf(v) or math.isnan(v)):
            raise ConfigError("non-finite value in config")
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise ConfigError(f"cannot serialize {type(v).__name__}")


def dumps_config(cfg: RunConfig) -> str:
    """Serialize so that loads_config(dumps_config(cfg)) == cfg."""
    lines = []
    for section, block in cfg.as_dict().items():
        lines.append(f"[{section}]")
        for k, v in block.items():
            lines.append(f"{k} = {_toml_value(v)}")
        lines.append("")
    return "\n".join(lines)


def default_config_text() -> str:
    return dumps_config(loads_config(""))
