"""Bundled invariant checks used by ``peakon-lab validate``.

Each suite returns a list of :class:`Check` rows (measured value against a
tolerance). The reference runs are small enough to finish in seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .integrator import (
    SolveConfig,
    Trajectory,
    lifespan,
    self_convergence_ratio,
    size_estimate_check,
    solve,
    standard_data,
)
from .spectral import Field, PeriodicGrid, bessel_apply, derivative, sobolev_norm
from .systems import (
    State,
    bracket_terms,
    conservative_rhs,
    momentum_from_state,
    peakon_profile,
    reformulated_rhs,
)
from .wellposed import mollifier_convergence_study, pt_symmetry_check

__all__ = [
    "Check",
    "SUITES",
    "random_state",
    "oracle_discrepancy",
    "track_peak",
    "peakon_speed",
    "reference_run",
    "run_suite",
]


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    tolerance: float
    passed: bool
    relation: str = "<="

    def row(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        tol = "-" if math.isnan(self.tolerance) else f"{self.tolerance:.6g}"
        return f"{self.name:<34} {self.measured:>13.6g} {self.relation:>2} {tol:<11} {flag}"


def _upper(name, measured, tol) -> Check:
    return Check(name, float(measured), float(tol), bool(measured <= tol))


def random_state(grid: PeriodicGrid, rng: np.random.Generator, kmax: int | None = None,
                 amplitude: float = 0.3) -> State:
    """Consistent random state with modes ``|k| <= kmax`` (default ``N/8``).

    Coefficients decay like ``1/(1+k^2)`` so all norms used here stay O(1).
    The default band keeps cubic products below ``N/2``.
    """
    n = grid.n_points
    kmax = n // 8 if kmax is None else int(kmax)

    def one():
        rhat = np.zeros(n // 2 + 1, dtype=complex)
        k = np.arange(kmax + 1)
        rhat[: kmax + 1] = (rng.normal(size=kmax + 1) + 1j * rng.normal(size=kmax + 1)) / (1 + k**2)
        rhat[0] = rhat[0].real
        return Field._from_rhat(grid, rhat * (amplitude * n / 2))

    return State.from_uv(one(), one())


def oracle_discrepancy(st: State, index: float = 0.0) -> float:
    """Largest relative ``H^index`` gap between the evolved rhs and the conservative oracle.

    The oracle gives ``(m_t, n_t)``; it is mapped back with ``D^-2`` and, for
    the ``w``/``z`` slots, differentiated.
    """
    mt, nt = conservative_rhs(momentum_from_state(st), st)
    ut, vt = bessel_apply(mt, -2), bessel_apply(nt, -2)
    ref = (ut, derivative(ut), vt, derivative(vt))
    got = reformulated_rhs(st).fields
    worst = 0.0
    for a, b in zip(got, ref):
        scale = sobolev_norm(b, index)
        gap = sobolev_norm(a - b, index)
        worst = max(worst, gap / scale if scale > 0 else gap)
    return worst


def track_peak(f: Field, reference: Field, refine: int = 32) -> float:
    """Shift of ``f`` relative to ``reference`` in ``[0, 2pi)``.

    Located as the maximiser of the circular cross-correlation, evaluated on a
    ``refine``-times finer grid by spectral interpolation. Unlike the raw
    argmax this is not thrown off by Gibbs ripples next to the crest.
    """
    n = f.grid.n_points
    m = refine * n
    corr = np.zeros(m // 2 + 1, dtype=complex)
    corr[: n // 2 + 1] = f.rhat * np.conj(reference.rhat)
    y = np.fft.irfft(corr, n=m)
    return 2 * np.pi * int(np.argmax(y)) / m


def peakon_speed(c: float = 1.0, eps: float = 0.05, n_points: int = 512, t_final: float = 0.2,
                 record_every: int = 5) -> tuple[float, Trajectory]:
    """Fitted crest velocity of the FORQ run started from periodised peakon data."""
    grid = PeriodicGrid(n_points)
    u0 = peakon_profile(c, 0.0, grid)
    cfg = SolveConfig(n_points=n_points, eps=eps, t_final=t_final, override_lifespan=True,
                      record_every=record_every)
    traj = solve(u0, u0, cfg)
    pos = np.unwrap([track_peak(st.u, u0) for st in traj.states])
    speed = float(np.polyfit(traj.times, pos, 1)[0])
    return speed, traj


def reference_run(n_points: int = 128, cfg: SolveConfig | None = None) -> tuple[Trajectory, SolveConfig]:
    """The smooth standard run over half its lifespan."""
    grid = PeriodicGrid(n_points)
    u0, v0 = standard_data(grid)
    cfg = cfg or SolveConfig(n_points=n_points)
    T = lifespan(sobolev_norm(u0, cfg.s), sobolev_norm(v0, cfg.s), cfg.c_s, cfg.delta0)
    cfg = replace(cfg, t_final=T / 2)
    return solve(u0, v0, cfg), cfg


def _rel_drift(series: np.ndarray) -> float:
    ref = abs(series[0])
    return float(np.max(np.abs(series - series[0])) / (ref if ref > 0 else 1.0))


def suite_oracle(n_states: int = 50, seed: int = 0) -> list[Check]:
    grid = PeriodicGrid(128)
    rng = np.random.default_rng(seed)
    worst = max(oracle_discrepancy(random_state(grid, rng)) for _ in range(n_states))
    st = random_state(grid, rng)
    sym = State(st.u, st.w, st.u, st.w)
    brackets = max(float(np.max(np.abs(f.values))) for f in bracket_terms(sym).values())
    rs = reformulated_rhs(sym)
    forq = max(float(np.max(np.abs(rs.v.values - rs.u.values))), float(np.max(np.abs(rs.z.values - rs.w.values))))
    return [
        _upper("oracle rel. discrepancy", worst, 1e-9),
        _upper("FORQ bracket terms", brackets, 1e-10),
        _upper("FORQ v-eq minus u-eq", forq, 1e-10),
    ]


def suite_conservation() -> list[Check]:
    traj, cfg = reference_run()
    grid = PeriodicGrid(cfg.n_points)
    u0, v0 = standard_data(grid)
    resid = traj["consistency_residual"] / (1 + traj["norm_u_Hs"])
    size = size_estimate_check(traj, cfg)
    ratio = self_convergence_ratio(u0, v0, cfg)
    return [
        _upper("H1 relative drift", _rel_drift(traj["H1"]), 1e-6),
        _upper("H2 relative drift", _rel_drift(traj["H2"]), 1e-6),
        _upper("consistency residual (scaled)", float(np.max(resid)), 1e-8),
        _upper("size estimate ratio", size.max_ratio, 1.0),
        Check("dt self-convergence ratio", ratio, 16.0, 12 <= ratio <= 20, "~"),
    ]


def suite_pt() -> list[Check]:
    grid = PeriodicGrid(128)
    u0 = Field.from_function(grid, lambda x: 0.2 * np.cos(x) + 0.1 * np.sin(2 * x))
    rep = pt_symmetry_check(u0, SolveConfig(), times=(0.05,))
    return [_upper("PT residual at t=+-0.05", rep.max_residual, 1e-6)]


def suite_peakon(c: float = 1.0) -> list[Check]:
    speed, _ = peakon_speed(c)
    target = -c * c
    err = abs(speed - target) / abs(target)
    return [
        Check("peak speed", speed, target, err <= 0.05, "~"),
        _upper("peak speed relative error", err, 0.05),
    ]


def suite_mollifier() -> list[Check]:
    grid = PeriodicGrid(128)
    u0, v0 = standard_data(grid)
    _, cfg = reference_run()
    rep = mollifier_convergence_study(u0, v0, [0.4, 0.2, 0.1, 0.05], cfg)
    # gap values are informational; the verdict is the monotonicity row
    rows = [Check(f"eps-gap at eps={e:g}", float(g), math.nan, True, "") for e, g in zip(rep.eps_list, rep.gaps)]
    rows.append(Check("monotone in eps (10% slack)", float(rep.passed), 1.0, rep.passed, "=="))
    return rows


SUITES = {
    "oracle": suite_oracle,
    "conservation": suite_conservation,
    "pt": suite_pt,
    "peakon": suite_peakon,
    "mollifier": suite_mollifier,
}


def run_suite(name: str) -> list[tuple[str, Check]]:
    """Run one suite, or all of them for ``name == "all"``."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}")
    return [(n, chk) for n in names for chk in SUITES[n]()]
