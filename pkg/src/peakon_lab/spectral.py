"""Periodic grids, Fourier multipliers and Sobolev norms on the circle.

Conventions
-----------
The circle is ``[0, 2*pi)`` sampled at ``x_k = 2*pi*k/N``. Fourier
coefficients are normalised as

    c_k = (1/2pi) * int_0^{2pi} exp(-i k x) f(x) dx  ~  fft(f)[k] / N,

so that ``f(x) = sum_k c_k exp(i k x)`` and the ``H^s`` norm is

    ||f||_{H^s}^2 = 2pi * sum_k (1 + k^2)^s |c_k|^2.

Wavenumbers run over ``{-N/2+1, ..., N/2}``. Odd multipliers (derivatives)
zero the Nyquist mode so that fields stay real.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import integrate

__all__ = [
    "PeriodicGrid",
    "Field",
    "forward_spectrum",
    "bessel_apply",
    "derivative",
    "helmholtz_multiplier_dx",
    "sobolev_norm",
    "sobolev_inner",
    "l2_inner",
    "mollify",
    "mollifier_symbol",
    "bump_cosine_transform",
    "product",
    "GridMismatchError",
]


class GridMismatchError(ValueError):
    """Raised when fields living on different grids are combined."""


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform sampling of the circle with ``n_points`` nodes."""

    n_points: int

    def __post_init__(self):
        n = self.n_points
        if int(n) != n or n < 8 or n % 2:
            raise ValueError(f"n_points must be an even integer >= 8, got {n!r}")

    @cached_property
    def x(self) -> np.ndarray:
        x = 2 * np.pi * np.arange(self.n_points) / self.n_points
        x.flags.writeable = False
        return x

    @property
    def dx(self) -> float:
        return 2 * np.pi / self.n_points

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Wavenumbers in FFT order, Nyquist counted as ``+N/2``."""
        n = self.n_points
        k = np.fft.fftfreq(n, 1.0 / n)
        k[n // 2] = n // 2
        k.flags.writeable = False
        return k

    @cached_property
    def rk(self) -> np.ndarray:
        """Non-negative wavenumbers ``0..N/2`` matching ``np.fft.rfft`` output."""
        k = np.arange(self.n_points // 2 + 1, dtype=float)
        k.flags.writeable = False
        return k

    @cached_property
    def reflection_index(self) -> np.ndarray:
        """Index map realising ``f(x) -> f(-x)`` on the nodes."""
        return (-np.arange(self.n_points)) % self.n_points


class Field:
    """A real periodic function sampled on a :class:`PeriodicGrid`.

    Fields are immutable: the sample array is copied and frozen on
    construction. The spectrum is computed lazily.
    """

    __slots__ = ("grid", "values", "_rhat")

    def __init__(self, grid: PeriodicGrid, values):
        values = np.array(values, dtype=float)
        if values.shape != (grid.n_points,):
            raise ValueError(
                f"expected {grid.n_points} samples, got shape {values.shape}"
            )
        values.flags.writeable = False
        self.grid = grid
        self.values = values
        self._rhat = None

    @classmethod
    def from_function(cls, grid: PeriodicGrid, func: Callable) -> "Field":
        return cls(grid, func(grid.x))

    @classmethod
    def zeros(cls, grid: PeriodicGrid) -> "Field":
        return cls(grid, np.zeros(grid.n_points))

    @classmethod
    def constant(cls, grid: PeriodicGrid, value: float) -> "Field":
        return cls(grid, np.full(grid.n_points, float(value)))

    @classmethod
    def _from_rhat(cls, grid: PeriodicGrid, rhat: np.ndarray) -> "Field":
        f = cls(grid, np.fft.irfft(rhat, n=grid.n_points))
        return f

    @property
    def rhat(self) -> np.ndarray:
        """Unnormalised ``rfft`` of the samples (read-only)."""
        if self._rhat is None:
            r = np.fft.rfft(self.values)
            r.flags.writeable = False
            self._rhat = r
        return self._rhat

    @property
    def spectrum(self) -> np.ndarray:
        """Full coefficient array ``c_k`` in FFT order (see module docstring)."""
        return forward_spectrum(self)

    def reflect(self) -> "Field":
        """Return ``x -> f(-x)``."""
        return Field(self.grid, self.values[self.grid.reflection_index])

    def _check(self, other: "Field"):
        if other.grid != self.grid:
            raise GridMismatchError(
                f"grid mismatch: {self.grid.n_points} vs {other.grid.n_points} points"
            )

    def __add__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return Field(self.grid, self.values + other.values)
        return Field(self.grid, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return Field(self.grid, self.values - other.values)
        return Field(self.grid, self.values - other)

    def __rsub__(self, other):
        return Field(self.grid, other - self.values)

    def __neg__(self):
        return Field(self.grid, -self.values)

    def __mul__(self, other):
        # Field * Field would alias silently; use product() instead.
        if isinstance(other, Field):
            return NotImplemented
        return Field(self.grid, self.values * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Field):
            return NotImplemented
        return Field(self.grid, self.values / other)

    def __repr__(self):
        return f"Field(n_points={self.grid.n_points}, max|f|={np.max(np.abs(self.values)):.3g})"


def forward_spectrum(f: Field) -> np.ndarray:
    """Fourier coefficients ``c_k`` of ``f`` in FFT order.

    Exact for trigonometric polynomials of degree below ``N/2``.
    """
    return np.fft.fft(f.values) / f.grid.n_points


def _apply_multiplier(f: Field, mult: np.ndarray, odd: bool = False) -> Field:
    rhat = f.rhat * mult
    if odd:
        rhat[-1] = 0.0
    return Field._from_rhat(f.grid, rhat)


def _bessel_symbol(rk: np.ndarray, s: float) -> np.ndarray:
    s = float(s)
    if not np.isfinite(s):
        raise ValueError(f"Sobolev index must be finite, got {s}")
    with np.errstate(over="raise"):
        try:
            return (1.0 + rk**2) ** (s / 2)
        except FloatingPointError:
            raise OverflowError(f"Bessel multiplier overflows for s={s}") from None


def bessel_apply(f: Field, s: float) -> Field:
    """Apply the Bessel potential ``(1 - d_xx)^(s/2)``."""
    return _apply_multiplier(f, _bessel_symbol(f.grid.rk, s))


def derivative(f: Field) -> Field:
    """Spectral ``d/dx``."""
    return _apply_multiplier(f, 1j * f.grid.rk, odd=True)


def helmholtz_multiplier_dx(f: Field) -> Field:
    """Apply ``(1 - d_xx)^{-1} d_x``, multiplier ``ik/(1+k^2)``."""
    rk = f.grid.rk
    return _apply_multiplier(f, 1j * rk / (1 + rk**2), odd=True)


def _power_weights(grid: PeriodicGrid, s: float) -> np.ndarray:
    # rfft bins 1..N/2-1 stand for two modes each; 0 and N/2 for one.
    w = (1.0 + grid.rk**2) ** float(s)
    w[1:-1] *= 2.0
    return w


def sobolev_inner(f: Field, g: Field, s: float) -> float:
    """``H^s`` inner product ``2pi * sum (1+k^2)^s c_k(f) conj(c_k(g))``."""
    f._check(g)
    n = f.grid.n_points
    w = _power_weights(f.grid, s)
    return float(2 * np.pi * np.sum(w * np.real(f.rhat * np.conj(g.rhat))) / n**2)


def sobolev_norm(f: Field, s: float) -> float:
    """``H^s`` norm; equals the L2 norm when ``s = 0``."""
    n = f.grid.n_points
    w = _power_weights(f.grid, s)
    return float(np.sqrt(2 * np.pi * np.sum(w * np.abs(f.rhat) ** 2)) / n)


def l2_inner(f: Field, g: Field) -> float:
    """Rectangle-rule ``int_0^{2pi} f g dx`` on the grid nodes."""
    f._check(g)
    return float(np.sum(f.values * g.values) * f.grid.dx)


# --- Friedrichs mollifier -------------------------------------------------


def _bump(y):
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    inside = np.abs(y) < 1
    out[inside] = np.exp(1.0 / (y[inside] ** 2 - 1.0))
    return out


def _bump_scalar(y: float) -> float:
    return float(np.exp(1.0 / (y * y - 1.0))) if abs(y) < 1 else 0.0


_BUMP_MASS = 2 * integrate.quad(_bump_scalar, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)[0]


def bump_cosine_transform(xi: float) -> float:
    """``int_{-1}^{1} j(y) cos(xi*y) dy`` for the normalised bump ``j``.

    ``j(y) = exp(1/(y^2-1)) / I`` on ``|y| < 1`` with unit mass.
    """
    xi = abs(float(xi))
    if xi == 0.0:
        return 1.0
    val, _ = integrate.quad(
        _bump_scalar, 0.0, 1.0, weight="cos", wvar=xi, epsabs=1e-12, limit=200
    )
    return 2 * val / _BUMP_MASS


_symbol_cache: dict[tuple[float, int], np.ndarray] = {}
_symbol_lock = threading.Lock()


def mollifier_symbol(eps: float, grid: PeriodicGrid) -> np.ndarray:
    """Multiplier ``m_eps(k)`` on the rfft wavenumbers, cached per (eps, grid)."""
    eps = float(eps)
    if not eps > 0:
        raise ValueError(f"mollifier width must be positive, got {eps}")
    key = (eps, grid.n_points)
    sym = _symbol_cache.get(key)
    if sym is not None:
        return sym
    with _symbol_lock:
        sym = _symbol_cache.get(key)
        if sym is None:
            sym = np.array([bump_cosine_transform(eps * k) for k in grid.rk])
            sym.flags.writeable = False
            _symbol_cache[key] = sym
    return sym


def mollify(f: Field, eps: float) -> Field:
    """Friedrichs mollifier ``J_eps f``."""
    return _apply_multiplier(f, mollifier_symbol(eps, f.grid))


# --- dealiased products ---------------------------------------------------


def _to_padded(rhat: np.ndarray, n: int) -> np.ndarray:
    """Samples on the 2N grid of the trigonometric interpolant of ``rhat``."""
    padded = np.zeros(n + 1, dtype=complex)
    padded[: n // 2 + 1] = rhat
    # the N-grid Nyquist term is cos(N x / 2): split it over +-N/2
    padded[n // 2] *= 0.5
    return np.fft.irfft(padded, n=2 * n) * 2.0


def _from_padded(values: np.ndarray, n: int) -> np.ndarray:
    """Truncate 2N-grid samples back to an N-grid rfft array."""
    full = np.fft.rfft(values) * 0.5
    rhat = full[: n // 2 + 1].copy()
    rhat[-1] = 2 * rhat[-1].real
    return rhat


def product(f: Field, g: Field) -> Field:
    """Pointwise product evaluated on a 2x zero-padded grid, then truncated."""
    f._check(g)
    n = f.grid.n_points
    pf = _to_padded(f.rhat, n)
    pg = _to_padded(g.rhat, n)
    return Field._from_rhat(f.grid, _from_padded(pf * pg, n))
