"""Right-hand sides of the two-component cubic peakon system.

The system for ``(u, v)`` with momenta ``m = u - u_xx``, ``n = v - v_xx`` is

    m_t = d_x[ m (u - u_x)(v + v_x) ],
    n_t = d_x[ n (u - u_x)(v + v_x) ].

``v = u`` gives the FORQ equation; ``v(x, t) = u(-x, -t)`` gives its
nonlocal (two-place) counterpart.

Time stepping uses the first-order reformulation in ``(u, w, v, z)`` with
``w = u_x`` and ``z = v_x`` carried as independent unknowns. The nonlocal
terms are Fourier multipliers (``D^-2 = (1 - d_xx)^-1`` and ``D^-2 d_x``).
All cubic terms are formed on a 2x zero-padded grid, which is alias-free
for cubic products of band-limited factors after truncation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    Field,
    GridMismatchError,
    PeriodicGrid,
    _from_padded,
    _to_padded,
    bessel_apply,
    derivative,
    mollifier_symbol,
    product,
)

__all__ = [
    "State",
    "Momentum",
    "HierarchyState",
    "momentum_from_state",
    "conservative_rhs",
    "conservative_velocity",
    "reformulated_rhs",
    "mollified_rhs",
    "bracket_terms",
    "hamiltonian_h1",
    "hamiltonian_h2",
    "mkdv_hierarchy_rhs",
    "mkdv_rhs",
    "peakon_profile",
]


@dataclass(frozen=True)
class State:
    """The quadruple ``(u, w, v, z)``; ``w``, ``z`` stand in for ``u_x``, ``v_x``."""

    u: Field
    w: Field
    v: Field
    z: Field

    def __post_init__(self):
        g = self.u.grid
        for f in (self.w, self.v, self.z):
            if f.grid != g:
                raise GridMismatchError("all four state fields must share one grid")

    @classmethod
    def from_uv(cls, u: Field, v: Field) -> "State":
        """Consistent state with ``w = u_x`` and ``z = v_x`` formed spectrally."""
        return cls(u, derivative(u), v, derivative(v))

    @classmethod
    def zeros(cls, grid: PeriodicGrid) -> "State":
        z = Field.zeros(grid)
        return cls(z, z, z, z)

    @property
    def grid(self) -> PeriodicGrid:
        return self.u.grid

    @property
    def fields(self) -> tuple[Field, Field, Field, Field]:
        return (self.u, self.w, self.v, self.z)

    def __add__(self, other: "State") -> "State":
        return State(*(a + b for a, b in zip(self.fields, other.fields)))

    def __sub__(self, other: "State") -> "State":
        return State(*(a - b for a, b in zip(self.fields, other.fields)))

    def __mul__(self, c: float) -> "State":
        return State(*(f * c for f in self.fields))

    __rmul__ = __mul__

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(f.values)) for f in self.fields)

    def pt_image(self) -> "State":
        """Image under ``(u, v)(x) -> (v(-x), u(-x))`` (derivatives flip sign)."""
        return State(self.v.reflect(), -self.z.reflect(), self.u.reflect(), -self.w.reflect())


@dataclass(frozen=True)
class Momentum:
    m: Field
    n: Field


@dataclass(frozen=True)
class HierarchyState:
    """Pair ``(m~, n~)`` evolved by the coupled mKdV-type system."""

    mt: Field
    nt: Field

    def __post_init__(self):
        if self.mt.grid != self.nt.grid:
            raise GridMismatchError("hierarchy fields must share one grid")


def momentum_from_state(st: State) -> Momentum:
    return Momentum(bessel_apply(st.u, 2), bessel_apply(st.v, 2))


def conservative_velocity(st: State) -> Field:
    """The common transport factor ``(u - w)(v + z)``."""
    return product(st.u - st.w, st.v + st.z)


def conservative_rhs(mom: Momentum, st: State) -> tuple[Field, Field]:
    """``(m_t, n_t)`` from the conservative form.

    Evaluated with two successive dealiased binary products; this path shares
    no code with :func:`reformulated_rhs` and serves as its oracle.
    """
    if mom.m.grid != st.grid or mom.n.grid != st.grid:
        raise GridMismatchError("momentum and state live on different grids")
    q = conservative_velocity(st)
    return derivative(product(mom.m, q)), derivative(product(mom.n, q))


class _Engine:
    """Multipliers and padded samples shared by one right-hand-side evaluation."""

    def __init__(self, st: State, eps: float | None):
        grid = st.grid
        n = grid.n_points
        rk = grid.rk
        self.n = n
        ik = 1j * rk
        ik[-1] = 0.0
        self.ik = ik
        self.hm2 = 1.0 / (1.0 + rk**2)
        self.hdx = ik * self.hm2
        self.sym = None if eps is None else mollifier_symbol(eps, grid)

        U, W, V, Z = (f.rhat for f in st.fields)
        pad = self.pad
        self.u, self.w, self.v, self.z = pad(U), pad(W), pad(V), pad(Z)
        self.wx, self.zx = pad(ik * W), pad(ik * Z)
        self.wxx, self.zxx = pad(-(rk**2) * W), pad(-(rk**2) * Z)
        if self.sym is None:
            self.um, self.vm, self.wm, self.zm = self.u, self.v, self.w, self.z
            self.wxm, self.zxm = self.wx, self.zx
            self.wxxm, self.zxxm = self.wxx, self.zxx
        else:
            J = self.sym
            self.um, self.wm, self.vm, self.zm = pad(J * U), pad(J * W), pad(J * V), pad(J * Z)
            self.wxm, self.zxm = pad(ik * J * W), pad(ik * J * Z)
            self.wxxm, self.zxxm = pad(-(rk**2) * J * W), pad(-(rk**2) * J * Z)

    def pad(self, rhat):
        return _to_padded(rhat, self.n)

    def T(self, values):
        return _from_padded(values, self.n)

    def J(self, rhat):
        return rhat if self.sym is None else self.sym * rhat


def _b_terms(e: _Engine):
    u, w, v, z, wx, zx = e.u, e.w, e.v, e.z, e.wx, e.zx
    B = -u * wx * z + w * wx * v - u * w * v + u * u * z + (w * wx * z - w * w * zx) / 3
    Bh = w * v * zx - u * z * zx + u * v * z - w * v * v + (w * z * zx - wx * z * z) / 3
    return B, Bh


def _rhs(st: State, eps: float | None) -> State:
    e = _Engine(st, eps)
    T, J = e.T, e.J
    u, w, v, z = e.u, e.w, e.v, e.z
    wx, zx, wxx, zxx = e.wx, e.zx, e.wxx, e.zxx
    um, wm, vm, zm = e.um, e.wm, e.vm, e.zm
    wxm, zxm, wxxm, zxxm = e.wxm, e.zxm, e.wxxm, e.zxxm
    B, Bh = _b_terms(e)

    # F, F-hat: never mollified
    a1 = w * w * z / 3 + (u * w * zx - w * wx * v + u * (u * zxx - wxx * v) / 3)
    a2 = 2 * u * u * v / 3 + w * w * v + B
    b1 = w * z * z / 3 - (u * z * zx - wx * v * z + v * (u * zxx - wxx * v) / 3)
    b2 = 2 * u * v * v / 3 + u * z * z + Bh

    du = T(-w * w * z / 3 + (2 * u * w * v + u * u * z) / 3) + e.hm2 * T(a1) + e.hdx * T(a2)
    dv = T(-w * z * z / 3 + (2 * u * v * z + w * v * v) / 3) + e.hm2 * T(b1) + e.hdx * T(b2)

    # G, G-hat: the third-derivative composites sit inside J
    g_loc = w * w * z / 3 + u * w * zx - w * wx * v
    g_mol = um * (um * zxxm - wxxm * vm) / 3
    G = e.hdx * (T(g_loc) + J(T(g_mol))) + e.hm2 * T(a2)
    gh_loc = w * z * z / 3 - (u * z * zx - wx * v * z)
    gh_mol = -v * (um * zxxm - wxxm * vm) / 3
    Gh = e.hdx * (T(gh_loc) + J(T(gh_mol))) + e.hm2 * T(b2)

    w_mol = (
        -wm * wxm * zm
        + (2 * um * wxm * vm + um * um * zxm) / 3
        + (um * wxm * zm - wm * wxm * vm)
    )
    w_loc = -w * w * v / 3 + 4 * u * w * z / 3 - 2 * u * u * v / 3 + (u * w * v - u * u * z)
    dw = J(T(w_mol)) + T(w_loc) + G

    z_mol = (
        -wm * zm * zxm
        + (2 * um * vm * zxm + wxm * vm * vm) / 3
        - (wm * vm * zxm - um * zm * zxm)
    )
    z_loc = -u * z * z / 3 + 4 * w * v * z / 3 - 2 * u * v * v / 3 - (u * v * z - w * v * v)
    dz = J(T(z_mol)) + T(z_loc) + Gh

    grid = st.grid
    out = []
    for rhat in (du, dw, dv, dz):
        rhat[-1] = 0.0
        out.append(Field._from_rhat(grid, rhat))
    return State(*out)


def reformulated_rhs(st: State) -> State:
    """Time derivative of ``(u, w, v, z)`` under the first-order reformulation."""
    return _rhs(st, None)


def mollified_rhs(st: State, eps: float) -> State:
    """Time derivative under the Friedrichs-mollified reformulation.

    The mollifier is placed exactly where the regularised system puts it:
    on the transport-type cubic terms of the ``w`` and ``z`` equations and on
    the third-derivative composites inside ``G`` and ``G-hat``. The ``u`` and
    ``v`` equations are left unmollified.
    """
    eps = float(eps)
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return _rhs(st, eps)


def bracket_terms(st: State) -> dict[str, Field]:
    """Terms that cancel identically when ``v = u`` and ``z = w``.

    Keys: ``curly_w``, ``curly_z`` (local brackets of the ``w``/``z``
    equations), ``curly_F``, ``curly_Fhat`` (brackets inside the nonlocal
    terms), ``B`` and ``Bhat``.
    """
    e = _Engine(st, None)
    u, w, v, z, wx, zx, wxx, zxx = e.u, e.w, e.v, e.z, e.wx, e.zx, e.wxx, e.zxx
    B, Bh = _b_terms(e)
    raw = {
        "curly_w": u * wx * z - w * wx * v + u * w * v - u * u * z,
        "curly_z": w * v * zx - u * z * zx + u * v * z - w * v * v,
        "curly_F": u * w * zx - w * wx * v + u * (u * zxx - wxx * v) / 3,
        "curly_Fhat": u * z * zx - wx * v * z + v * (u * zxx - wxx * v) / 3,
        "B": B,
        "Bhat": Bh,
    }
    return {k: Field._from_rhat(st.grid, e.T(val)) for k, val in raw.items()}


def hamiltonian_h1(st: State) -> float:
    """``int m (v + v_x) dx`` by the rectangle rule."""
    m = bessel_apply(st.u, 2)
    return float(np.sum(m.values * (st.v.values + st.z.values)) * st.grid.dx)


def hamiltonian_h2(st: State) -> float:
    """``1/2 int (u - u_x)^2 (v + v_x) n dx`` by the rectangle rule."""
    n = bessel_apply(st.v, 2)
    a = st.u.values - st.w.values
    b = st.v.values + st.z.values
    return float(0.5 * np.sum(a * a * b * n.values) * st.grid.dx)


def _d3(f: Field) -> Field:
    return derivative(derivative(derivative(f)))


def mkdv_hierarchy_rhs(hs: HierarchyState) -> HierarchyState:
    """``(-m''' - 6 m n m', -n''' - 6 n m n')`` for the coupled mKdV system."""
    m, n = hs.mt, hs.nt
    mn = product(m, n)
    dm = -_d3(m) - 6.0 * product(mn, derivative(m))
    dn = -_d3(n) - 6.0 * product(mn, derivative(n))
    return HierarchyState(dm, dn)


def mkdv_rhs(m: Field) -> Field:
    """Scalar mKdV right-hand side ``-m''' - 6 m^2 m'``."""
    return -_d3(m) - 6.0 * product(product(m, m), derivative(m))


_PEAKON_IMAGES = 10


def peakon_profile(c: float, t: float, grid: PeriodicGrid) -> Field:
    """Periodised peakon ``c sqrt(3/2) exp(-|x + c^2 t|)`` on the circle.

    The crest sits at ``x = (-c^2 t) mod 2pi``; images ``|n| <= 10`` are summed.
    """
    c = float(c)
    if c == 0:
        raise ValueError("peakon speed parameter c must be nonzero")
    xi = np.mod(grid.x + c * c * t + np.pi, 2 * np.pi) - np.pi
    shifts = 2 * np.pi * np.arange(-_PEAKON_IMAGES, _PEAKON_IMAGES + 1)
    vals = np.exp(-np.abs(xi[:, None] + shifts[None, :])).sum(axis=1)
    return Field(grid, c * np.sqrt(1.5) * vals)
