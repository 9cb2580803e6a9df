"""Run configuration: flat ``key = value`` files, command-line overrides, presets."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .errors import InvalidInputError

MODES = ("simulate", "tau-d", "sweep-radius")
SPACETIMES = ("schwarzschild", "flat")
TRAJECTORIES = ("circular", "inertial")
SI_KEYS = ("r_s_m", "v_m_s", "r_m")

FIG2_RS_OVER_R = 0.9


@dataclass
class RunConfig:
    """Fully resolved run parameters; every field is a valid config key."""

    mode: str = "simulate"
    r_over_rs: float = 1.0 / FIG2_RS_OVER_R
    v_over_c: float = 0.8
    w_over_mc: float = 0.1
    tau_max_over_tau_s: float = 5.0
    dtau_over_tau_s: float = 5e-4
    nodes: int = 128
    output_stride: int = 0
    momentum_transport: bool = False
    direction: int = 1
    spacetime: str = "schwarzschild"
    trajectory: str = "circular"
    sweep_points: int = 299
    r_s_m: float = math.nan
    v_m_s: float = math.nan
    r_m: float = math.nan
    output_path: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in SI_KEYS:
            if math.isnan(d[k]):
                d[k] = None
        return d

    @property
    def uses_si(self) -> bool:
        return not math.isnan(self.r_s_m)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
ALIASES = {"rs_over_r": None, "out": "output_path"}
KEYS = tuple(_FIELD_TYPES) + tuple(ALIASES)


def _to_bool(val) -> bool:
    if isinstance(val, bool):
        return val
    s = str(val).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise InvalidInputError(f"not a boolean: {val!r}")


def _coerce(key: str, val):
    kind = _FIELD_TYPES[key]
    try:
        if kind == "float":
            return math.nan if val is None else float(val)
        if kind == "int":
            f = float(val)
            if f != int(f):
                raise ValueError
            return int(f)
        if kind == "bool":
            return _to_bool(val)
        return str(val)
    except (TypeError, ValueError):
        raise InvalidInputError(f"bad value for {key}: {val!r}") from None


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInputError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key] = val.strip("\"'")
    return out


def load_config_file(path) -> dict:
    """Read a key-value file or a JSON run record (its ``config`` section)."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        rec = json.loads(text)
        cfg = dict(rec.get("config", rec))
        return {k: v for k, v in cfg.items() if v is not None}
    return parse_config_text(text)


def build_config(*layers: dict) -> RunConfig:
    """Merge mappings left to right (later wins) and validate."""
    merged = {}
    for layer in layers:
        for key, val in layer.items():
            key = key.replace("-", "_")
            if key not in KEYS:
                raise InvalidInputError(f"unknown config key {key!r}")
            if key == "rs_over_r":
                x = float(val)
                if not 0.0 < x < 1.0:
                    raise InvalidInputError(f"rs_over_r must lie in (0, 1), got {val}")
                key, val = "r_over_rs", 1.0 / x
            elif key in ALIASES:
                key = ALIASES[key]
            merged[key] = _coerce(key, val)
    cfg = RunConfig(**merged)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig):
    if cfg.mode not in MODES:
        raise InvalidInputError(f"mode must be one of {MODES}, got {cfg.mode!r}")
    if cfg.spacetime not in SPACETIMES:
        raise InvalidInputError(f"spacetime must be one of {SPACETIMES}")
    if cfg.trajectory not in TRAJECTORIES:
        raise InvalidInputError(f"trajectory must be one of {TRAJECTORIES}")
    if cfg.trajectory == "inertial" and cfg.spacetime != "flat":
        raise InvalidInputError("inertial trajectory requires spacetime = flat")
    for key in ("r_over_rs", "v_over_c", "w_over_mc", "tau_max_over_tau_s", "dtau_over_tau_s"):
        if not math.isfinite(getattr(cfg, key)):
            raise InvalidInputError(f"{key} must be finite")
    if cfg.spacetime == "schwarzschild" and cfg.r_over_rs <= 1.0:
        raise InvalidInputError(f"r_over_rs must exceed 1 (outside the horizon), got {cfg.r_over_rs}")
    if not 0.0 <= cfg.v_over_c < 1.0:
        raise InvalidInputError(f"v_over_c must lie in [0, 1), got {cfg.v_over_c}")
    if cfg.w_over_mc < 0:
        raise InvalidInputError(f"w_over_mc must be >= 0, got {cfg.w_over_mc}")
    if cfg.tau_max_over_tau_s <= 0 or cfg.dtau_over_tau_s <= 0:
        raise InvalidInputError("tau_max_over_tau_s and dtau_over_tau_s must be positive")
    if not 4 <= cfg.nodes <= 4096:
        raise InvalidInputError(f"nodes must lie in [4, 4096], got {cfg.nodes}")
    if cfg.output_stride < 0:
        raise InvalidInputError("output_stride must be >= 0 (0 = automatic)")
    if cfg.direction not in (1, -1):
        raise InvalidInputError("direction must be +1 or -1")
    if cfg.sweep_points < 2:
        raise InvalidInputError("sweep_points must be >= 2")
    si = [not math.isnan(getattr(cfg, k)) for k in SI_KEYS]
    if any(si) and not all(si):
        raise InvalidInputError(f"SI inputs need all of {SI_KEYS}")
    if all(si):
        if cfg.mode != "tau-d":
            raise InvalidInputError("SI inputs are only accepted by the iss preset (tau-d)")
        if not (0 < cfg.r_s_m < cfg.r_m and 0 <= cfg.v_m_s < 299_792_458.0):
            raise InvalidInputError("SI inputs need 0 < r_s_m < r_m and 0 <= v_m_s < c")


PRESETS = {
    "fig2": {"mode": "simulate", "rs_over_r": FIG2_RS_OVER_R, "v_over_c": 0.8, "w_over_mc": 0.1},
    "fig3": {"mode": "sweep-radius", "v_over_c": 0.8},
    "iss": {"mode": "tau-d", "r_s_m": 8.87e-3, "v_m_s": 7.7e3, "r_m": 6.8e6},
    "flat-inertial": {"mode": "simulate", "spacetime": "flat", "trajectory": "inertial",
                      "v_over_c": 0.8, "w_over_mc": 0.1},
    "photon-sphere": {"mode": "simulate", "r_over_rs": 1.5, "v_over_c": 0.8, "w_over_mc": 0.1},
}
