"""Hoelder exponents of the data-to-solution map and the experiments around them.

The exponent maps ``gamma(s, r)`` (solutions in ``H^r``) and ``mu(s, p)``
(time derivatives in ``H^p``) are piecewise over regions ``A1..A6`` and
``B1..B6`` of the plane. Boundaries are shared between neighbouring
regions; ties go to the lowest index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .integrator import BlowUpError, SolveConfig, Trajectory, auto_dt, lifespan, rhs, solve
from .spectral import Field, PeriodicGrid, sobolev_norm
from .systems import State

__all__ = [
    "RegionResult",
    "OutOfScopeError",
    "default_eps0",
    "default_eps1",
    "classify_gamma",
    "classify_mu",
    "gamma_predicates",
    "mu_predicates",
    "exponent_continuity_audit",
    "AuditReport",
    "perturbation_shape",
    "SweepResult",
    "SweepAborted",
    "holder_sweep",
    "continuity_experiment",
    "ContinuityReport",
    "pt_symmetry_check",
    "PTReport",
    "mollifier_convergence_study",
    "MollifierReport",
    "decreasing_with_slack",
]


class OutOfScopeError(ValueError):
    """The point lies outside the region where the exponents are defined."""


@dataclass(frozen=True)
class RegionResult:
    region: str
    exponent: float
    eps_param: float


# --- exponent maps ----------------------------------------------------------


def default_eps0(s: float) -> float:
    """``min(0.1, (2s-5)/2)`` inside ``s <= 3``; 0.1 beyond (unused there)."""
    if s <= 3:
        return min(0.1, (2 * s - 5) / 2)
    return 0.1


def _eps1_upper(s: float) -> float:
    if s <= 11 / 4:
        return 2 * s - 5
    return 2 * s - 11 / 2


def default_eps1(s: float) -> float:
    if s <= 3:
        return min(0.1, _eps1_upper(s) / 2)
    return 0.1


def _check_eps(eps: float, upper: float, name: str):
    if not 0 < eps < upper:
        raise ValueError(f"{name}={eps} must lie in (0, {upper:.6g}) for this s")


def classify_gamma(s: float, r: float, eps0: float | None = None) -> RegionResult:
    """Region ``A_j`` containing ``(s, r)`` and the exponent ``gamma``."""
    if not s > 2.5:
        raise OutOfScopeError(f"requires s > 5/2, got s={s}")
    if not r < s:
        raise OutOfScopeError(f"requires r < s, got s={s}, r={r}")
    if eps0 is None:
        eps0 = default_eps0(s)
    elif s <= 3:
        _check_eps(eps0, 2 * s - 5, "eps0")

    d = s - r
    if (1.5 < r <= s - 1) or (0 <= r <= 1.5 and 3 - s <= r < s - 1.5):
        return RegionResult("A1", 1.0, eps0)
    if s < 3 and r < 3 - s:
        return RegionResult("A2", (2 * s - 3) / d, eps0)
    if s <= 3 and s - 1.5 <= r <= 1.5:
        if 4 * d * d > 3 * (2 * s - 3):
            return RegionResult("A3", 2 * d / (3 + eps0), eps0)
        return RegionResult("A4", (2 * s - 3 - eps0) / (2 * d), eps0)
    if s - 1 < r < s:
        return RegionResult("A5", d, eps0)
    if s >= 3 and r < 0:
        return RegionResult("A6", s / d, eps0)
    raise AssertionError(f"no region matched (s, r)=({s}, {r})")  # pragma: no cover


def classify_mu(s: float, p: float, eps1: float | None = None) -> RegionResult:
    """Region ``B_j`` containing ``(s, p)`` and the exponent ``mu``."""
    if not s > 2.5:
        raise OutOfScopeError(f"requires s > 5/2, got s={s}")
    if not p < s - 1:
        raise OutOfScopeError(f"requires p < s - 1, got s={s}, p={p}")
    if eps1 is None:
        eps1 = default_eps1(s)
    elif s <= 3:
        _check_eps(eps1, _eps1_upper(s), "eps1")

    d = s - p - 1
    if (0.5 < p <= s - 2) or (s > 11 / 4 and 0 <= p <= 0.5 and 3 - s <= p < s - 2.5):
        return RegionResult("B1", 1.0, eps1)
    above = 4 * d * d > 3 * (2 * s - 3)
    if 11 / 4 < s < 3 and s - 2.5 <= p <= 0.5 and above:
        return RegionResult("B2", 2 * d / (3 + eps1), eps1)
    if (2.5 < s <= 11 / 4 and p <= 0.5) or (11 / 4 < s <= 3 and s - 2.5 <= p <= 0.5 and not above):
        return RegionResult("B3", (2 * s - 3 - eps1) / (2 * d), eps1)
    if 11 / 4 < s < 3 and p < 3 - s:
        return RegionResult("B4", (2 * s - 4) / d, eps1)
    if s - 2 < p < s - 1:
        return RegionResult("B5", d, eps1)
    if s >= 3 and p < 0:
        return RegionResult("B6", (s - 1) / d, eps1)
    raise AssertionError(f"no region matched (s, p)=({s}, {p})")  # pragma: no cover


def gamma_predicates(s: float, r: float) -> dict[str, bool]:
    """Raw membership of ``(s, r)`` in each ``A_j``, without tie-breaking."""
    d = s - r
    par = 4 * d * d > 3 * (2 * s - 3)
    return {
        "A1": (1.5 < r <= s - 1) or (0 <= r <= 1.5 and 3 - s <= r < s - 1.5),
        "A2": 2.5 < s < 3 and r < 3 - s,
        "A3": 2.5 < s <= 3 and s - 1.5 <= r <= 1.5 and par,
        "A4": 2.5 < s <= 3 and s - 1.5 <= r <= 1.5 and not par,
        "A5": s - 1 < r < s,
        "A6": s >= 3 and r < 0,
    }


def mu_predicates(s: float, p: float) -> dict[str, bool]:
    """Raw membership of ``(s, p)`` in each ``B_j``, without tie-breaking."""
    d = s - p - 1
    par = 4 * d * d > 3 * (2 * s - 3)
    return {
        "B1": (0.5 < p <= s - 2) or (s > 11 / 4 and 0 <= p <= 0.5 and 3 - s <= p < s - 2.5),
        "B2": 11 / 4 < s < 3 and s - 2.5 <= p <= 0.5 and par,
        "B3": (2.5 < s <= 11 / 4 and p <= 0.5) or (11 / 4 < s <= 3 and s - 2.5 <= p <= 0.5 and not par),
        "B4": 11 / 4 < s < 3 and p < 3 - s,
        "B5": s - 2 < p < s - 1,
        "B6": s >= 3 and p < 0,
    }


# --- continuity audit ------------------------------------------------------

# (name, s, second coordinate on the boundary, axis to offset along,
#  continuous only as eps0/eps1 -> 0). The representative points keep both
#  offset sides inside the neighbouring regions for offsets up to 0.05.
_GAMMA_BOUNDARIES = [
    ("gamma: s=3, r<0", 3.0, -1.0, "s", False),
    ("gamma: s>=3, r=0", 3.5, 0.0, "r", False),
    ("gamma: r=3-s", 2.8, 0.2, "r", False),
    ("gamma: r=s-1", 2.8, 1.8, "r", False),
    ("gamma: r=s-3/2", 2.8, 1.3, "r", True),
    ("gamma: r=3/2", 2.8, 1.5, "r", True),
    ("gamma: parabola 4(s-r)^2=3(2s-3)", 2.8, 2.8 - math.sqrt(3 * 2.6) / 2, "r", True),
]
_MU_BOUNDARIES = [
    ("mu: s=3, p<0", 3.0, -1.0, "s", False),
    ("mu: s>=3, p=0", 3.5, 0.0, "p", False),
    ("mu: p=3-s", 2.9, 0.1, "p", False),
    ("mu: p=s-2", 2.8, 0.8, "p", False),
    ("mu: p=s-5/2", 2.9, 0.4, "p", True),
    ("mu: p=1/2", 2.9, 0.5, "p", True),
    ("mu: parabola 4(s-p-1)^2=3(2s-3)", 2.8, 2.8 - 1 - math.sqrt(3 * 2.6) / 2, "p", True),
]


@dataclass(frozen=True)
class AuditReport:
    eps: float
    gaps: dict[str, float]
    regions: dict[str, tuple[str, str]]

    @property
    def max_gap(self) -> float:
        return max(self.gaps.values())


def exponent_continuity_audit(eps: float) -> AuditReport:
    """Exponent jump across each boundary where continuity is expected.

    Points sit ``eps`` to either side of the boundary. On boundaries that
    are continuous only in the limit, ``eps0``/``eps1`` is set to ``eps``.
    """
    if not 0 < eps <= 0.05:
        raise ValueError(f"eps must lie in (0, 0.05], got {eps}")
    gaps, regions = {}, {}
    for table, classify in ((_GAMMA_BOUNDARIES, classify_gamma), (_MU_BOUNDARIES, classify_mu)):
        for name, s, y, axis, limit in table:
            if axis == "s":
                lo, hi = (s - eps, y), (s + eps, y)
            else:
                lo, hi = (s, y - eps), (s, y + eps)
            kw = eps if limit else None
            a = classify(*lo, kw)
            b = classify(*hi, kw)
            gaps[name] = abs(a.exponent - b.exponent)
            regions[name] = (a.region, b.region)
    return AuditReport(eps=eps, gaps=gaps, regions=regions)


# --- experiments ------------------------------------------------------------


def perturbation_shape(grid: PeriodicGrid) -> Field:
    """Fixed perturbation profile ``cos 3x + sin 5x``."""
    return Field.from_function(grid, lambda x: np.cos(3 * x) + np.sin(5 * x))


def decreasing_with_slack(values, slack: float = 0.1) -> bool:
    """Each value at most ``(1 + slack)`` times its predecessor, last below first."""
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        return True
    return bool(np.all(v[1:] <= (1 + slack) * v[:-1]) and v[-1] < v[0])


def _pair_distance(a: Trajectory, b: Trajectory, index: float, which: str = "solution", eps: float = 0.0) -> float:
    """Sup over recorded times of ``|u_a - u_b| + |v_a - v_b|`` in ``H^index``."""
    best = 0.0
    for sa, sb in zip(a.states, b.states):
        if which == "solution":
            da, db = sa, sb
        else:
            da, db = rhs(sa, eps), rhs(sb, eps)
        d = sobolev_norm(da.u - db.u, index) + sobolev_norm(da.v - db.v, index)
        best = max(best, d)
    return best


@dataclass(frozen=True)
class SweepResult:
    s: float
    index: float
    quantity: str
    deltas: np.ndarray
    distances: np.ndarray
    slope: float
    predicted: RegionResult
    horizon: float
    rho: float

    @property
    def passed(self) -> bool:
        return self.slope >= 0.8 * self.predicted.exponent


class SweepAborted(RuntimeError):
    def __init__(self, message, partial: list[tuple[float, float]]):
        super().__init__(message)
        self.partial = partial


def holder_sweep(base_u0: Field, base_v0: Field, s: float, r: float, deltas, cfg: SolveConfig,
                 quantity: str = "solution", rho: float | None = None) -> SweepResult:
    """Empirical Hoelder slope of the data-to-solution map.

    With ``quantity="solution"`` both components of the data are shifted by
    the fixed profile scaled so the pair difference has ``H^r`` size ``delta``;
    the sup-in-time ``H^r`` distance of the solutions is recorded. With
    ``quantity="time_derivative"``, ``r`` plays the role of ``p``: data
    differences are measured in ``H^{p+1}`` and the distance of the time
    derivatives in ``H^p``.

    Runs go to half the uniform lifespan ``T_{rho,delta0}``, where ``rho``
    defaults to the largest ``H^s`` norm among all initial data involved.
    """
    deltas = np.asarray(deltas, dtype=float)
    if quantity == "solution":
        predicted = classify_gamma(s, r)
        data_index = r
    elif quantity == "time_derivative":
        predicted = classify_mu(s, r)
        data_index = r + 1
    else:
        raise ValueError(f"unknown quantity {quantity!r}")
    pos = deltas[deltas > 0]
    if len(pos) < 3:
        raise ValueError("need >= 3 deltas for fit")

    grid = base_u0.grid
    shape = perturbation_shape(grid)
    shape = shape * (1.0 / (2 * sobolev_norm(shape, data_index)))

    data = [(base_u0 + shape * d, base_v0 + shape * d) for d in pos]
    needed = max(
        max(sobolev_norm(a, s), sobolev_norm(b, s))
        for a, b in [(base_u0, base_v0)] + data
    )
    if rho is None:
        rho = needed
    elif rho < needed * (1 - 1e-12):
        raise ValueError(f"rho={rho} is below the data norm {needed:.6g}")
    horizon = lifespan(0, 0, cfg.c_s, cfg.delta0, rho=rho) / 2
    run_cfg = replace(cfg, s=s, t_final=horizon, override_lifespan=True)

    # common step so that every leg records the same times
    dt = cfg.dt
    if dt is None:
        dt = min(auto_dt(State.from_uv(a, b), cfg.cfl) for a, b in [(base_u0, base_v0)] + data)
    run_cfg = replace(run_cfg, dt=dt)

    index = r
    partial: list[tuple[float, float]] = []
    try:
        base = solve(base_u0, base_v0, run_cfg)
        for d, (a, b) in zip(pos, data):
            pert = solve(a, b, run_cfg)
            partial.append((float(d), _pair_distance(base, pert, index, quantity, cfg.eps)))
    except BlowUpError as exc:
        raise SweepAborted(f"sweep aborted: {exc}", partial) from exc

    dist = np.array([p[1] for p in partial])
    slope = float(np.polyfit(np.log(pos), np.log(dist), 1)[0])
    return SweepResult(s=s, index=r, quantity=quantity, deltas=pos, distances=dist, slope=slope,
                       predicted=predicted, horizon=horizon, rho=rho)


@dataclass(frozen=True)
class ContinuityReport:
    sizes: np.ndarray
    dist_C: np.ndarray
    dist_C1: np.ndarray
    passed: bool


def continuity_experiment(u0: Field, v0: Field, sizes, cfg: SolveConfig, shape: Field | None = None) -> ContinuityReport:
    """Distances in ``C(I, H^s)`` and ``C^1(I, H^{s-1})`` along shrinking perturbations.

    ``sizes`` are the ``H^s`` sizes of the perturbation of the pair.
    The ``C^1`` distance is ``sup |diff|_{H^{s-1}} + sup |d_t diff|_{H^{s-1}}``
    with time derivatives evaluated from the right-hand side.
    """
    sizes = np.asarray(sizes, dtype=float)
    if np.any(np.diff(sizes) >= 0) or np.any(sizes < 0):
        raise ValueError("perturbation sizes must be strictly decreasing and nonnegative")
    s = cfg.s
    if shape is None:
        shape = perturbation_shape(u0.grid)
    shape = shape * (1.0 / (2 * sobolev_norm(shape, s)))
    if cfg.dt is None:
        cfg = replace(cfg, dt=auto_dt(State.from_uv(u0, v0), cfg.cfl))
    base = solve(u0, v0, cfg)
    # perturbed legs reuse the base time grid
    leg = replace(cfg, t_final=float(base.times[-1]), override_lifespan=True)
    dC, dC1 = [], []
    for size in sizes:
        pert = solve(u0 + shape * size, v0 + shape * size, leg)
        dC.append(_pair_distance(base, pert, s))
        dC1.append(_pair_distance(base, pert, s - 1) + _pair_distance(base, pert, s - 1, "time_derivative", cfg.eps))
    dC, dC1 = np.array(dC), np.array(dC1)
    ok = decreasing_with_slack(dC) and decreasing_with_slack(dC1)
    return ContinuityReport(sizes=sizes, dist_C=dC, dist_C1=dC1, passed=ok)


@dataclass(frozen=True)
class PTReport:
    times: np.ndarray
    residuals: np.ndarray
    data_norm: float
    tol: float

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if len(self.residuals) else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol * (1 + self.data_norm) ** 3


def pt_symmetry_check(u0: Field, cfg: SolveConfig, times=(0.05,), tol: float = 1e-6) -> PTReport:
    """Witness of the nonlocal reduction ``v(x, t) = u(-x, -t)``.

    Sets ``v0(x) = u0(-x)``, integrates to ``+t`` and ``-t`` with the same step
    and reports ``|v(., t) - u(-., -t)|_{H^{s-1}}`` for ``t = +-t_i``.
    """
    v0 = u0.reflect()
    s = cfg.s
    res, ts = [], []
    for t in times:
        t = float(t)
        if t == 0:
            ts.append(0.0)
            res.append(sobolev_norm(v0 - u0.reflect(), s - 1))
            continue
        c = replace(cfg, override_lifespan=True)
        fwd = solve(u0, v0, replace(c, t_final=t)).final
        bwd = solve(u0, v0, replace(c, t_final=-t)).final
        ts += [t, -t]
        res.append(sobolev_norm(fwd.v - bwd.u.reflect(), s - 1))
        res.append(sobolev_norm(bwd.v - fwd.u.reflect(), s - 1))
    norm = sobolev_norm(u0, s) + sobolev_norm(v0, s)
    return PTReport(times=np.array(ts), residuals=np.array(res), data_norm=norm, tol=tol)


@dataclass(frozen=True)
class MollifierReport:
    eps_list: np.ndarray
    gaps: np.ndarray
    passed: bool


def mollifier_convergence_study(u0: Field, v0: Field, eps_list, cfg: SolveConfig) -> MollifierReport:
    """Sup-in-time ``H^{s-1}`` gap between mollified and unmollified runs."""
    eps_list = np.asarray(eps_list, dtype=float)
    if np.any(np.diff(eps_list) >= 0) or np.any(eps_list <= 0):
        raise ValueError("eps_list must be positive and strictly decreasing")
    base = solve(u0, v0, replace(cfg, eps=0.0))
    gaps = []
    for eps in eps_list:
        tr = solve(u0, v0, replace(cfg, eps=float(eps)))
        g = 0.0
        for a, b in zip(tr.states, base.states):
            g = max(g, sum(sobolev_norm(x - y, cfg.s - 1) for x, y in zip(a.fields, b.fields)))
        gaps.append(g)
    gaps = np.array(gaps)
    return MollifierReport(eps_list=eps_list, gaps=gaps, passed=decreasing_with_slack(gaps))
