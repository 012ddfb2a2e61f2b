"""Flat ``key = value`` run configuration.

    # comment
    n = 64
    alpha = 0.75
    init.kind = single_mode
    init.mode = 1, 0
    sweep.alpha = 0.7, 0.75, 0.9

Unknown or repeated keys are errors. Everything is validated on parse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .dynamics import SimParams
from .initdata import RNG_NAME, InitSpec
from .spectral import Grid


class ConfigError(ValueError):
    pass


def _bool(v: str) -> bool:
    low = v.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _pair(v: str) -> tuple[int, int]:
    parts = [p.strip() for p in v.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated integers, got {v!r}")
    return int(parts[0]), int(parts[1])


def _floats(v: str) -> list[float]:
    out = [float(p) for p in v.split(",") if p.strip()]
    if not out:
        raise ValueError("empty list")
    return out


def _opt_float(v: str) -> Optional[float]:
    return None if v.lower() in ("none", "") else float(v)


def _rng(v: str) -> str:
    if v.lower() != RNG_NAME:
        raise ValueError(f"only the {RNG_NAME} generator is supported")
    return RNG_NAME


# key -> (converter, default); a default of REQUIRED marks a mandatory key
REQUIRED = object()
SCHEMA: dict[str, tuple[Callable[[str], Any], Any]] = {
    "n": (int, REQUIRED),
    "l": (float, 2 * math.pi),
    "alpha": (float, REQUIRED),
    "k": (float, 1.0),
    "dt": (float, REQUIRED),
    "t_end": (float, REQUIRED),
    "cfl": (float, 0.5),
    "dealias": (_bool, True),
    "record_every": (int, 1),
    "snapshot_every": (int, 0),
    "tolerance": (float, 1e-6),
    "out_dir": (str, "qg_out"),
    "thm2.threshold": (float, 0.05),
    "init.kind": (str, REQUIRED),
    "init.amplitude": (float, 1.0),
    "init.mode": (_pair, (1, 0)),
    "init.mode2": (_pair, (0, 1)),
    "init.amplitude2": (_opt_float, None),
    "init.peak": (float, 4.0),
    "init.width": (float, 1.0),
    "init.slope": (float, 1.5),
    "init.cutoff": (int, 0),
    "init.seed": (int, 0),
    "init.rng": (_rng, RNG_NAME),
    "init.target_norm": (_opt_float, None),
    "init.target_sigma": (_opt_float, None),
    "sweep.alpha": (_floats, None),
    "sweep.k": (_floats, None),
    "sweep.target_norm": (_floats, None),
    "sweep.workers": (int, 1),
}


@dataclass(frozen=True)
class RunConfig:
    grid: Grid
    params: SimParams
    init: InitSpec
    out_dir: str = "qg_out"
    snapshot_every: int = 0
    tolerance: float = 1e-6
    thm2_threshold: float = 0.05
    sweep: dict[str, list[float]] = field(default_factory=dict)
    sweep_workers: int = 1
    values: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def record_every(self) -> int:
        return self.params.record_every


def _split(text: str) -> dict[str, str]:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def parse_config(text: str, overrides: Optional[dict[str, str]] = None) -> RunConfig:
    raw = _split(text)
    for key, value in (overrides or {}).items():
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r}")
        raw[key] = value
    v: dict[str, Any] = {}
    for key, (conv, default) in SCHEMA.items():
        if key in raw:
            try:
                v[key] = conv(raw[key])
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from None
        elif default is REQUIRED:
            raise ConfigError(f"missing required key {key!r}")
        else:
            v[key] = default
    return _build(v)


def _build(v: dict[str, Any]) -> RunConfig:
    try:
        grid = Grid(v["n"], v["l"])
        params = SimParams(
            alpha=v["alpha"],
            k=v["k"],
            dt=v["dt"],
            t_end=v["t_end"],
            cfl_coeff=v["cfl"],
            dealias_on=v["dealias"],
            record_every=v["record_every"],
        )
        init = InitSpec(
            kind=v["init.kind"],
            amplitude=v["init.amplitude"],
            mode=v["init.mode"],
            mode2=v["init.mode2"],
            amplitude2=v["init.amplitude2"],
            peak=v["init.peak"],
            width=v["init.width"],
            slope=v["init.slope"],
            cutoff=v["init.cutoff"],
            seed=v["init.seed"],
            target_norm=v["init.target_norm"],
            target_sigma=v["init.target_sigma"],
        )
        init.check_grid(grid)
        if v["snapshot_every"] < 0:
            raise ValueError("snapshot_every must be >= 0")
        if v["tolerance"] < 0:
            raise ValueError("tolerance must be >= 0")
        if v["sweep.workers"] < 1:
            raise ValueError("sweep.workers must be >= 1")
        sweep = {}
        for name in ("alpha", "k", "target_norm"):
            values = v[f"sweep.{name}"]
            if values is not None:
                sweep[name] = values
        for a in sweep.get("alpha", []):
            if not 0.5 < a <= 1:
                raise ValueError(f"sweep.alpha value {a} outside the admissible range 1/2 < alpha <= 1")
        for k in sweep.get("k", []):
            if not k > 0:
                raise ValueError(f"sweep.k value {k} must be > 0")
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(
        grid=grid,
        params=params,
        init=init,
        out_dir=v["out_dir"],
        snapshot_every=v["snapshot_every"],
        tolerance=v["tolerance"],
        thm2_threshold=v["thm2.threshold"],
        sweep=sweep,
        sweep_workers=v["sweep.workers"],
        values=v,
    )


def load_config(path: str, overrides: Optional[dict[str, str]] = None) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), overrides)


def format_config(cfg: RunConfig, **changes: Any) -> str:
    """Serialize back to the text format, applying ``changes`` (keys with dots as ``__``)."""
    v = dict(cfg.values)
    for key, value in changes.items():
        v[key.replace("__", ".")] = value
    lines = []
    for key in SCHEMA:
        value = v.get(key)
        if value is None:
            continue
        if isinstance(value, (tuple, list)):
            value = ", ".join(repr(x) if isinstance(x, float) else str(x) for x in value)
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
