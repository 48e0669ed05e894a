"""Run configuration, initial-data descriptions and CSV/JSON emission.

A run config is one flat JSON object. Keys matching :class:`SolveConfig`
fields configure the solver; the remaining keys describe the initial data
(``u0``, ``v0``), the RNG seed and, for sweeps, the sweep itself.

Initial data descriptions::

    {"cos": [[1, 0.3]], "sin": [[2, 0.1]], "const": 0.0}   trigonometric sum
    {"peakon": {"c": 1.0}}                                 periodised peakon
    "zero"                                                 zero field
    "u0" / "pt"          (v0 only) copy of u0 / its reflection u0(-x)
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .integrator import SolveConfig, Trajectory
from .spectral import Field, PeriodicGrid
from .systems import peakon_profile

DEFAULT_U0 = {"cos": [[1, 0.3]], "sin": [[2, 0.1]]}
DEFAULT_V0 = "u0"

TRAJECTORY_COLUMNS = ("t", "norm_u_Hs", "norm_v_Hs", "norm_UV_Hs1", "H1", "H2", "consistency_residual")
FIELD_COLUMNS = ("x", "u", "w", "v", "z")
SWEEP_COLUMNS = ("delta", "distance", "log_delta", "log_distance")

_RUN_KEYS = {"u0", "v0", "seed"}
_SWEEP_KEYS = {"r", "p", "deltas", "quantity", "rho"}


class ConfigError(ValueError):
    """Bad or unreadable configuration; maps to exit status 1."""


def fmt(x: float) -> str:
    """17 significant digits: round-trips any double."""
    return "%.17g" % x


@dataclass
class RunConfig:
    solver: SolveConfig
    u0: Any = field(default_factory=lambda: DEFAULT_U0)
    v0: Any = DEFAULT_V0
    seed: int = 0
    sweep: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        """Everything with defaults materialised, as plain JSON types."""
        out = dict(self.solver.to_dict())
        out.update(u0=self.u0, v0=self.v0, seed=self.seed)
        out.update(self.sweep)
        return out


def load_config(path, sweep: bool = False) -> RunConfig:
    """Read and validate a config file. Raises :class:`ConfigError`."""
    p = Path(path)
    try:
        raw = json.loads(p.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"config {p} must hold a JSON object")
    return parse_config(raw, sweep=sweep)


def parse_config(raw: dict, sweep: bool = False) -> RunConfig:
    raw = dict(raw)
    extra = _RUN_KEYS | (_SWEEP_KEYS if sweep else set())
    solver_keys = {k: raw.pop(k) for k in list(raw) if k not in extra}
    try:
        solver = SolveConfig.from_dict(solver_keys)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a nonnegative integer, got {seed!r}")
    cfg = RunConfig(solver=solver, u0=raw.get("u0", DEFAULT_U0), v0=raw.get("v0", DEFAULT_V0), seed=seed)
    if sweep:
        cfg.sweep = _parse_sweep(raw)
    # fail early on malformed data descriptions
    initial_data(cfg)
    return cfg


def _parse_sweep(raw: dict) -> dict:
    if ("r" in raw) == ("p" in raw):
        raise ConfigError("sweep config needs exactly one of 'r' or 'p'")
    quantity = raw.get("quantity", "solution" if "r" in raw else "time_derivative")
    if quantity not in ("solution", "time_derivative"):
        raise ConfigError(f"unknown sweep quantity {quantity!r}")
    deltas = raw.get("deltas", [1e-4, 1e-3, 1e-2, 1e-1])
    if not isinstance(deltas, list) or not all(isinstance(d, (int, float)) for d in deltas):
        raise ConfigError("deltas must be a list of numbers")
    out = {"deltas": [float(d) for d in deltas], "quantity": quantity, "rho": raw.get("rho")}
    key = "r" if "r" in raw else "p"
    out[key] = float(raw[key])
    return out


def _trig(grid: PeriodicGrid, desc: dict) -> Field:
    unknown = set(desc) - {"cos", "sin", "const"}
    if unknown:
        raise ConfigError(f"unknown initial-data keys {sorted(unknown)}")
    vals = np.full(grid.n_points, float(desc.get("const", 0.0)))
    for kind, fn in (("cos", np.cos), ("sin", np.sin)):
        for term in desc.get(kind, []):
            try:
                k, amp = term
            except (TypeError, ValueError):
                raise ConfigError(f"{kind} terms must be [k, amplitude] pairs, got {term!r}") from None
            if int(k) != k or abs(k) >= grid.n_points // 2:
                raise ConfigError(f"mode {k} not representable on {grid.n_points} points")
            vals += float(amp) * fn(int(k) * grid.x)
    return Field(grid, vals)


def make_field(grid: PeriodicGrid, desc) -> Field:
    if desc == "zero":
        return Field.zeros(grid)
    if isinstance(desc, dict) and "peakon" in desc:
        opts = desc["peakon"] or {}
        try:
            return peakon_profile(float(opts.get("c", 1.0)), float(opts.get("t", 0.0)), grid)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if isinstance(desc, dict):
        return _trig(grid, desc)
    raise ConfigError(f"cannot interpret initial data {desc!r}")


def initial_data(cfg: RunConfig) -> tuple[Field, Field]:
    grid = PeriodicGrid(cfg.solver.n_points)
    u0 = make_field(grid, cfg.u0)
    if cfg.v0 == "u0":
        v0 = u0
    elif cfg.v0 == "pt":
        v0 = u0.reflect()
    else:
        v0 = make_field(grid, cfg.v0)
    return u0, v0


# --- writers ------------------------------------------------------------------


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def write_manifest(out_dir, command: str, cfg: RunConfig, extra: dict | None = None) -> Path:
    """Written before any computation so a crashed run still leaves a record."""
    os.makedirs(out_dir, exist_ok=True)
    man = {
        "command": command,
        "config": cfg.resolved(),
        "tool_version": __version__,
        "seed": cfg.seed,
        "initial_data": {"u0": cfg.u0, "v0": cfg.v0},
    }
    if extra:
        man.update(extra)
    path = Path(out_dir) / "manifest.json"
    write_json(path, man)
    return path


def _write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([fmt(v) for v in row])


def write_trajectory(out_dir, traj: Trajectory) -> None:
    cols = [traj.times] + [traj[c] for c in TRAJECTORY_COLUMNS[1:]]
    _write_rows(Path(out_dir) / "trajectory.csv", TRAJECTORY_COLUMNS, zip(*cols))
    for i, st in enumerate(traj.states):
        data = [st.grid.x, st.u.values, st.w.values, st.v.values, st.z.values]
        _write_rows(Path(out_dir) / f"fields_{i}.csv", FIELD_COLUMNS, zip(*data))


def write_sweep(out_dir, pairs) -> None:
    rows = []
    for d, dist in pairs:
        rows.append((d, dist, np.log(d), np.log(dist) if dist > 0 else -np.inf))
    _write_rows(Path(out_dir) / "sweep.csv", SWEEP_COLUMNS, rows)


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path) as fh:
        rd = csv.reader(fh)
        header = next(rd)
        data = np.array([[float(v) for v in row] for row in rd], dtype=float)
    return header, data
