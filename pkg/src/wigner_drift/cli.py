"""Command-line front end: ``wigner-drift simulate|tau-d|sweep-radius|preset``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import KEYS, PRESETS, RunConfig, build_config, load_config_file
from .errors import WignerDriftError
from .evolution import (
    JULIAN_YEAR,
    DecoherenceParams,
    circular_packet,
    decoherence_time,
    decoherence_time_si,
    normalized_inverse_tau_d,
    run_simulation,
)
from .kinematics import CircularOrbit, inertial_line
from .wavepacket import PacketSpec

SHELL_TOL = 1e-14
DRIFT_TOL = 1e-10

SIM_COLUMNS = ("tau_over_tau_s", "entropy_bits", "bloch_1", "bloch_2", "bloch_3", "centroid_angle_rad")
SWEEP_COLUMNS = ("rs_over_r", "inverse_tau_d_over_inverse_tau_s")


class DiagnosticsError(WignerDriftError):
    """Run finished but an integrator diagnostic is out of tolerance."""


def fmt(x) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf"
    return format(x, ".12g")


def to_csv(columns, rows) -> str:
    lines = [",".join(columns)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _json_value(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _source(cfg: RunConfig):
    if cfg.trajectory == "inertial":
        return inertial_line(cfg.v_over_c)
    if cfg.spacetime == "flat":
        return CircularOrbit(1.0, cfg.v_over_c, direction=cfg.direction, r_s=0.0)
    return CircularOrbit(cfg.r_over_rs, cfg.v_over_c, direction=cfg.direction)


def cmd_simulate(cfg: RunConfig):
    """Return (csv_text, record) for a proper-time series run."""
    source = _source(cfg)
    if isinstance(source, CircularOrbit):
        packet = circular_packet(source, cfg.w_over_mc, cfg.nodes)
    else:
        packet = PacketSpec(math.sinh(math.atanh(cfg.v_over_c)), cfg.w_over_mc, quadrature_nodes=cfg.nodes)
    res = run_simulation(source, packet, cfg.tau_max_over_tau_s, cfg.dtau_over_tau_s,
                         cfg.output_stride or None, momentum_transport=cfg.momentum_transport)
    rows = np.column_stack([res.tau, res.entropy, res.bloch, res.centroid_angle])
    diag = dict(res.diagnostics)
    diag["entropy_in_range"] = bool(np.all((res.entropy >= 0) & (res.entropy <= 1)))
    record = {
        "result": {
            "columns": list(SIM_COLUMNS),
            "rows": rows.tolist(),
            "final_entropy": float(res.entropy[-1]),
        },
        "diagnostics": diag,
    }
    return to_csv(SIM_COLUMNS, rows), record


def check_diagnostics(diag: dict):
    if diag.get("max_shell_violation", 0.0) > SHELL_TOL:
        raise DiagnosticsError(f"mass-shell violation {diag['max_shell_violation']:.3g} > {SHELL_TOL}")
    if diag.get("max_rotor_drift", 0.0) > DRIFT_TOL:
        raise DiagnosticsError(f"rotor drift {diag['max_rotor_drift']:.3g} > {DRIFT_TOL}")
    if not diag.get("entropy_in_range", True):
        raise DiagnosticsError("entropy left [0, 1]")


def cmd_tau_d(cfg: RunConfig):
    """Return (lines, record) for the closed-form decoherence time."""
    if cfg.uses_si:
        seconds = decoherence_time_si(cfg.r_s_m, cfg.v_m_s, cfg.r_m)
        result = {
            "tau_d_seconds_per_mc_over_w": seconds,
            "tau_d_years_per_mc_over_w": seconds / JULIAN_YEAR,
        }
    else:
        if cfg.spacetime == "flat":
            params = DecoherenceParams(1.0, cfg.v_over_c, cfg.w_over_mc or 1.0, r_s=0.0)
        else:
            params = DecoherenceParams(cfg.r_over_rs, cfg.v_over_c, cfg.w_over_mc or 1.0)
        tau_d = decoherence_time(params)
        # tau_s = m r_s / w (or m r / w when flat), with m = c = 1
        result = {"tau_d": tau_d, "tau_d_over_tau_s": tau_d * params.w_over_mc}
    lines = [f"{k} = {fmt(v)}" for k, v in result.items()]
    return lines, {"result": {k: _json_value(v) for k, v in result.items()}, "diagnostics": {}}


def sweep_grid(n: int) -> np.ndarray:
    """Uniform r_s/r = k/(n+1) plus the final decade approaching 1."""
    uniform = np.arange(1, n + 1) / (n + 1)
    tail = 1.0 - 10.0 ** (-np.linspace(2.0, 3.0, 11))
    return np.unique(np.concatenate([uniform, tail]))


def cmd_sweep_radius(cfg: RunConfig):
    xs = sweep_grid(cfg.sweep_points)
    vals = np.array([normalized_inverse_tau_d(x, cfg.v_over_c) for x in xs])
    rows = np.column_stack([xs, vals])
    record = {"result": {"columns": list(SWEEP_COLUMNS), "rows": rows.tolist()}, "diagnostics": {}}
    return to_csv(SWEEP_COLUMNS, rows), record


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _add_keys(p: argparse.ArgumentParser):
    p.add_argument("--config", metavar="FILE", help="key = value file or JSON run record")
    for key in KEYS:
        flags = [f"--{key}"]
        if "_" in key:
            flags.append(f"--{key.replace('_', '-')}")
        p.add_argument(*flags, dest=f"key_{key}", default=None, metavar="VALUE")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wigner-drift",
        description="Spin decoherence of a wave packet moving through Schwarzschild spacetime.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("simulate", "entropy vs proper time"),
                        ("tau-d", "closed-form decoherence time"),
                        ("sweep-radius", "inverse decoherence time vs r_s/r")):
        _add_keys(sub.add_parser(name, help=help_))
    pp = sub.add_parser("preset", help="run a bundled configuration")
    pp.add_argument("name", choices=sorted(PRESETS))
    _add_keys(pp)
    return parser


def resolve_config(args) -> tuple[RunConfig, str | None]:
    layers = []
    preset = None
    if args.command == "preset":
        preset = args.name
        layers.append(PRESETS[preset])
    if args.config:
        layers.append(load_config_file(args.config))
    flags = {k[4:]: v for k, v in vars(args).items() if k.startswith("key_") and v is not None}
    layers.append(flags)
    mode = PRESETS[preset]["mode"] if preset else args.command
    layers.append({"mode": mode})
    return build_config(*layers), preset


def run(cfg: RunConfig, preset=None, stdout=None):
    stdout = stdout or sys.stdout
    if cfg.mode == "simulate":
        text, record = cmd_simulate(cfg)
    elif cfg.mode == "sweep-radius":
        text, record = cmd_sweep_radius(cfg)
    else:
        lines, record = cmd_tau_d(cfg)
        text = "\n".join(lines) + "\n"

    record = {
        "artifact": "wigner-drift",
        "version": __version__,
        "command": cfg.mode,
        "preset": preset,
        "config": cfg.to_dict(),
        **record,
    }
    out = cfg.output_path
    if out:
        path = Path(out)
        if cfg.mode == "tau-d":
            stdout.write(text)
            json_path = path if path.suffix == ".json" else path.with_suffix(".json")
        else:
            with open(path, "w", newline="\n") as fh:
                fh.write(text)
            json_path = path.with_suffix(".json")
        json_path.write_text(json.dumps(record, indent=2) + "\n")
    else:
        stdout.write(text)
    check_diagnostics(record["diagnostics"])
    return record


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg, preset = resolve_config(args)
        run(cfg, preset)
    except (WignerDriftError, OSError, json.JSONDecodeError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"wigner-drift: error: {msg}", file=sys.stderr)
        return 3 if isinstance(exc, DiagnosticsError) else 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
