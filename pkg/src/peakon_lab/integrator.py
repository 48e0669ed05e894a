"""Classical RK4 method of lines for the reformulated peakon system.

Also home to the lifespan formula and the monitors that compare a run
against the size estimate and the cubic energy inequality.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .spectral import Field, PeriodicGrid, derivative, sobolev_norm
from .systems import (
    State,
    hamiltonian_h1,
    hamiltonian_h2,
    mollified_rhs,
    reformulated_rhs,
)

__all__ = [
    "DEFAULT_CS",
    "SolveConfig",
    "Trajectory",
    "BlowUpError",
    "lifespan",
    "rhs",
    "rk4_step",
    "auto_dt",
    "solve",
    "size_estimate_check",
    "SizeEstimateReport",
    "energy_ratio_monitor",
    "EnergyRatioReport",
    "calibrate_cs",
    "standard_data",
    "self_convergence_ratio",
]

# 2 x sup of the energy ratio on the standard run, see calibrate_cs().
DEFAULT_CS = 0.0862


@dataclass(frozen=True)
class SolveConfig:
    """Run parameters.

    ``t_final=None`` integrates to the lifespan ``T_delta0``; its sign sets
    the direction. ``dt=None`` picks the step from the CFL rule in
    :func:`auto_dt`. ``eps=0`` runs the unmollified system.
    """

    s: float = 3.0
    delta0: float = 0.5
    c_s: float = DEFAULT_CS
    eps: float = 0.0
    dt: float | None = None
    t_final: float | None = None
    n_points: int = 128
    record_every: int = 1
    cfl: float = 0.3
    override_lifespan: bool = False
    blowup_factor: float = 10.0

    def __post_init__(self):
        if not 0 < self.delta0 < 1:
            raise ValueError(f"delta0 must lie in (0, 1), got {self.delta0}")
        if not self.c_s > 0:
            raise ValueError(f"c_s must be positive, got {self.c_s}")
        if self.eps < 0:
            raise ValueError(f"eps must be nonnegative, got {self.eps}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive; the sign of t_final sets the direction")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError(f"record_every must be a positive integer, got {self.record_every}")
        if not self.cfl > 0:
            raise ValueError(f"cfl must be positive, got {self.cfl}")
        PeriodicGrid(self.n_points)  # validates n_points

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SolveConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


_DIAGNOSTICS = (
    "norm_u_Hs",
    "norm_v_Hs",
    "norm_UV_Hs1",
    "norm_U_Hs1",
    "norm_V_Hs1",
    "H1",
    "H2",
    "consistency_residual",
)


@dataclass(frozen=True)
class Trajectory:
    """Recorded states and per-time diagnostics of one run."""

    s: float
    times: np.ndarray
    states: tuple[State, ...]
    diagnostics: dict[str, np.ndarray]
    eps: float = 0.0
    completed: bool = True

    def __getitem__(self, key: str) -> np.ndarray:
        return self.diagnostics[key]

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> State:
        return self.states[-1]


class BlowUpError(RuntimeError):
    """A run produced non-finite values or left the size-estimate envelope."""

    def __init__(self, message: str, time: float | None = None, trajectory: Trajectory | None = None):
        super().__init__(message)
        self.time = time
        self.trajectory = trajectory


def lifespan(u0_norm: float, v0_norm: float, c_s: float, delta0: float, rho: float | None = None) -> float:
    """Guaranteed existence time.

    ``(1 - delta0) / (8 c_s (|u0| + |v0|)^2)``; passing ``rho`` switches to
    the uniform-in-ball variant ``(1 - delta0) / (32 c_s rho^2)``.
    Zero data give ``inf``.
    """
    if not 0 < delta0 < 1:
        raise ValueError(f"delta0 must lie in (0, 1), got {delta0}")
    if not c_s > 0:
        raise ValueError(f"c_s must be positive, got {c_s}")
    if rho is not None:
        if rho < 0:
            raise ValueError("rho must be nonnegative")
        return math.inf if rho == 0 else (1 - delta0) / (32 * c_s * rho**2)
    if u0_norm < 0 or v0_norm < 0:
        raise ValueError("norms must be nonnegative")
    total = u0_norm + v0_norm
    if total == 0:
        return math.inf
    return (1 - delta0) / (8 * c_s * total**2)


def rhs(st: State, eps: float = 0.0) -> State:
    return mollified_rhs(st, eps) if eps > 0 else reformulated_rhs(st)


def rk4_step(st: State, dt: float, eps: float = 0.0) -> State:
    """One classical RK4 step; raises :class:`BlowUpError` on non-finite output."""
    if dt == 0:
        raise ValueError("dt must be nonzero")
    k1 = rhs(st, eps)
    k2 = rhs(st + k1 * (dt / 2), eps)
    k3 = rhs(st + k2 * (dt / 2), eps)
    k4 = rhs(st + k3 * dt, eps)
    out = st + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6)
    if not out.is_finite():
        raise BlowUpError("non-finite values after RK4 step")
    return out


def auto_dt(st: State, cfl: float = 0.3) -> float:
    """``cfl * dx / (1 + max |(u - w)(v + z)|)``."""
    speed = np.max(np.abs((st.u.values - st.w.values) * (st.v.values + st.z.values)))
    return cfl * st.grid.dx / (1.0 + speed)


def _uv_norm(st: State, s: float) -> tuple[float, float]:
    U = sobolev_norm(st.u, s - 1) + sobolev_norm(st.w, s - 1)
    V = sobolev_norm(st.v, s - 1) + sobolev_norm(st.z, s - 1)
    return U, V


def _diagnose(st: State, s: float) -> dict[str, float]:
    U, V = _uv_norm(st, s)
    resid = sobolev_norm(st.w - derivative(st.u), s - 2) + sobolev_norm(
        st.z - derivative(st.v), s - 2
    )
    return {
        "norm_u_Hs": sobolev_norm(st.u, s),
        "norm_v_Hs": sobolev_norm(st.v, s),
        "norm_UV_Hs1": U + V,
        "norm_U_Hs1": U,
        "norm_V_Hs1": V,
        "H1": hamiltonian_h1(st),
        "H2": hamiltonian_h2(st),
        "consistency_residual": resid,
    }


def _freeze(s, times, states, rows, eps, completed) -> Trajectory:
    t = np.array(times, dtype=float)
    t.flags.writeable = False
    diags = {}
    for key in _DIAGNOSTICS:
        a = np.array([r[key] for r in rows], dtype=float)
        a.flags.writeable = False
        diags[key] = a
    return Trajectory(s=s, times=t, states=tuple(states), diagnostics=diags, eps=eps, completed=completed)


def solve(u0: Field, v0: Field, cfg: SolveConfig) -> Trajectory:
    """Integrate from ``(u0, v0)`` with ``w0 = u0_x``, ``z0 = v0_x``.

    Raises :class:`BlowUpError` (carrying the partial trajectory) on
    non-finite values or when ``||(U, V)||_{H^{s-1}}`` exceeds
    ``blowup_factor`` times the size-estimate bound.
    """
    if u0.grid != v0.grid:
        raise ValueError("u0 and v0 must share a grid")
    if u0.grid.n_points != cfg.n_points:
        raise ValueError(f"data has {u0.grid.n_points} points, config says {cfg.n_points}")
    s = cfg.s
    nu0, nv0 = sobolev_norm(u0, s), sobolev_norm(v0, s)
    T_life = lifespan(nu0, nv0, cfg.c_s, cfg.delta0)
    t_final = T_life if cfg.t_final is None else float(cfg.t_final)
    if not math.isfinite(t_final):
        raise ValueError("t_final is infinite (zero data); give an explicit t_final")
    if abs(t_final) > T_life * (1 + 1e-12) and not cfg.override_lifespan:
        raise ValueError(
            f"|t_final|={abs(t_final):.6g} exceeds the lifespan {T_life:.6g}; "
            "set override_lifespan to integrate anyway"
        )

    st = State.from_uv(u0, v0)
    bound = 2 / math.sqrt(cfg.delta0) * (nu0 + nv0)
    limit = cfg.blowup_factor * bound

    times, states, rows = [0.0], [st], [_diagnose(st, s)]
    if t_final == 0:
        return _freeze(s, times, states, rows, cfg.eps, True)

    dt = cfg.dt if cfg.dt is not None else auto_dt(st, cfg.cfl)
    n_steps = max(1, math.ceil(abs(t_final) / dt - 1e-9))
    direction = math.copysign(1.0, t_final)
    t = 0.0
    for i in range(1, n_steps + 1):
        h = direction * dt if i < n_steps else t_final - t
        try:
            st = rk4_step(st, h, cfg.eps)
        except BlowUpError as exc:
            raise BlowUpError(
                f"non-finite values at t={t + h:.6g}",
                time=t + h,
                trajectory=_freeze(s, times, states, rows, cfg.eps, False),
            ) from exc
        t = t_final if i == n_steps else t + h
        big = sum(_uv_norm(st, s))
        if big > limit and bound > 0:
            raise BlowUpError(
                f"||(U,V)||_H^(s-1)={big:.4g} exceeds {cfg.blowup_factor}x size bound at t={t:.6g}",
                time=t,
                trajectory=_freeze(s, times, states, rows, cfg.eps, False),
            )
        if i % cfg.record_every == 0 or i == n_steps:
            times.append(t)
            states.append(st)
            rows.append(_diagnose(st, s))
    return _freeze(s, times, states, rows, cfg.eps, True)


@dataclass(frozen=True)
class SizeEstimateReport:
    bound: float
    max_ratio: float
    passed: bool
    ratios: np.ndarray = field(repr=False)


def size_estimate_check(traj: Trajectory, cfg: SolveConfig) -> SizeEstimateReport:
    """Check ``|u(t)| + |v(t)| <= 2/sqrt(delta0) (|u0| + |v0|)`` in ``H^s``."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    total = traj["norm_u_Hs"] + traj["norm_v_Hs"]
    bound = 2 / math.sqrt(cfg.delta0) * total[0]
    if bound == 0:
        ratios = np.where(total == 0, 0.0, np.inf)
    else:
        ratios = total / bound
    max_ratio = float(np.max(ratios))
    return SizeEstimateReport(bound=float(bound), max_ratio=max_ratio, passed=max_ratio <= 1.0, ratios=ratios)


@dataclass(frozen=True)
class EnergyRatioReport:
    """Empirical constants in ``|d/dt |U|| <= C |U|^2 |V|`` and its V twin."""

    sup_ratio_u: float
    sup_ratio_v: float
    defined: bool

    @property
    def sup_ratio(self) -> float:
        return max(self.sup_ratio_u, self.sup_ratio_v)


def energy_ratio_monitor(traj: Trajectory) -> EnergyRatioReport:
    """Central-difference estimate of the energy-inequality constants.

    Works on ``||U||_{H^{s-1}}`` and ``||V||_{H^{s-1}}`` at interior record
    times; points where the denominator vanishes are skipped.
    """
    if len(traj) < 3:
        raise ValueError("need at least 3 recorded times")
    t = traj.times
    U, V = traj["norm_U_Hs1"], traj["norm_V_Hs1"]
    span = t[2:] - t[:-2]
    dU = np.abs(U[2:] - U[:-2]) / span
    dV = np.abs(V[2:] - V[:-2]) / span
    Ui, Vi = U[1:-1], V[1:-1]
    den_u = Ui**2 * Vi
    den_v = Ui * Vi**2
    ok = (den_u > 0) & (den_v > 0)
    if not np.any(ok):
        return EnergyRatioReport(math.nan, math.nan, False)
    return EnergyRatioReport(
        sup_ratio_u=float(np.max(dU[ok] / den_u[ok])),
        sup_ratio_v=float(np.max(dV[ok] / den_v[ok])),
        defined=True,
    )


def standard_data(grid: PeriodicGrid) -> tuple[Field, Field]:
    """``u0 = v0 = 0.3 cos x + 0.1 sin 2x``."""
    f = Field.from_function(grid, lambda x: 0.3 * np.cos(x) + 0.1 * np.sin(2 * x))
    return f, f


def calibrate_cs(u0: Field | None = None, v0: Field | None = None, s: float = 3.0,
                 horizon: float = 1.2, n_points: int = 128, dt: float | None = None) -> float:
    """Twice the sup energy ratio over ``[0, horizon]`` of a smooth run."""
    grid = PeriodicGrid(n_points)
    if u0 is None or v0 is None:
        u0, v0 = standard_data(grid)
    cfg = SolveConfig(s=s, t_final=horizon, n_points=n_points, dt=dt, override_lifespan=True)
    rep = energy_ratio_monitor(solve(u0, v0, cfg))
    if not rep.defined:
        raise ValueError("energy ratio undefined for zero data")
    return 2 * rep.sup_ratio


def with_overrides(cfg: SolveConfig, **kw) -> SolveConfig:
    return replace(cfg, **kw)


def _l2_gap(a: State, b: State) -> float:
    return sum(sobolev_norm(x - y, 0.0) for x, y in zip(a.fields, b.fields))


def self_convergence_ratio(u0: Field, v0: Field, cfg: SolveConfig, base_dt: float | None = None) -> float:
    """Richardson ratio ``|S_h - S_{h/2}| / |S_{h/2} - S_{h/4}|`` at ``t_final``.

    Differences are L2 norms summed over ``(u, w, v, z)``; the high-``k``
    weights of ``H^s`` would be dominated by roundoff at these error levels.
    ``base_dt`` defaults to half of ``|t_final|``. A fourth-order scheme
    gives about 16.
    """
    c = replace(cfg, override_lifespan=True)
    if c.t_final is None:
        T = lifespan(sobolev_norm(u0, c.s), sobolev_norm(v0, c.s), c.c_s, c.delta0)
        c = replace(c, t_final=T)
    h = abs(c.t_final) / 2 if base_dt is None else float(base_dt)
    finals = [solve(u0, v0, replace(c, dt=h / 2**j)).final for j in range(3)]
    return _l2_gap(finals[0], finals[1]) / _l2_gap(finals[1], finals[2])
