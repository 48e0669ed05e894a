import math
import threading

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from peakon_lab.spectral import (
    Field,
    GridMismatchError,
    PeriodicGrid,
    bessel_apply,
    bump_cosine_transform,
    derivative,
    forward_spectrum,
    helmholtz_multiplier_dx,
    l2_inner,
    mollifier_symbol,
    mollify,
    product,
    sobolev_inner,
    sobolev_norm,
)
from strategies import fields

# m_eps(k) at eps*k = 1, 0.5, 2.5 from 30-digit mpmath quadrature of the bump
BUMP_COS_GOLDEN = {
    1.0: 0.92311901081790524116,
    0.5: 0.98037326957148321150,
    2.5: 0.58472950183235649321,
}


def fn(grid, f):
    return Field.from_function(grid, f)


# --- grid and field ---------------------------------------------------------


@pytest.mark.parametrize("n", [0, 4, 7, 9, 6.5, -8])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        PeriodicGrid(n)


def test_grid_nodes_and_wavenumbers():
    g = PeriodicGrid(16)
    assert np.all(np.diff(g.x) > 0)
    assert g.x[0] == 0 and g.x[-1] < 2 * np.pi
    assert sorted(g.wavenumbers) == list(range(-7, 9))


def test_field_is_immutable(grid128):
    f = fn(grid128, np.cos)
    with pytest.raises(ValueError):
        f.values[0] = 1.0
    with pytest.raises(ValueError):
        f.rhat[0] = 1.0


def test_field_shape_checked(grid128):
    with pytest.raises(ValueError):
        Field(grid128, np.zeros(64))


def test_grid_mismatch_raises():
    a = Field.zeros(PeriodicGrid(16))
    b = Field.zeros(PeriodicGrid(32))
    with pytest.raises(GridMismatchError):
        _ = a + b
    with pytest.raises(GridMismatchError):
        product(a, b)


def test_field_times_field_is_refused(grid128):
    f = fn(grid128, np.cos)
    with pytest.raises(TypeError):
        _ = f * f


# --- forward spectrum -------------------------------------------------------


def test_spectrum_of_constant(grid128):
    c = forward_spectrum(Field.constant(grid128, 1.0))
    assert c[0] == pytest.approx(1.0)
    assert np.max(np.abs(c[1:])) < 1e-15


def test_spectrum_of_cos(grid128):
    c = forward_spectrum(fn(grid128, np.cos))
    assert c[1] == pytest.approx(0.5)
    assert c[-1] == pytest.approx(0.5)


def test_spectrum_sin3_matches_quadrature():
    g = PeriodicGrid(16)
    f = fn(g, lambda x: np.sin(3 * x))
    c = forward_spectrum(f)
    # trapezoid rule for (1/2pi) int exp(-ikx) f dx, written out directly
    for k in (3, -3, 0, 5):
        quad = sum(np.exp(-1j * k * x) * np.sin(3 * x) for x in g.x) / g.n_points
        assert abs(c[k % 16] - quad) < 1e-14
    assert c[3] == pytest.approx(-0.5j)
    assert c[-3] == pytest.approx(0.5j)


@given(fields())
def test_hermitian_and_round_trip(f):
    c = forward_spectrum(f)
    n = f.grid.n_points
    k = np.arange(1, n // 2)
    scale = np.max(np.abs(c))
    assert np.max(np.abs(c[k] - np.conj(c[n - k]))) <= 1e-12 * scale
    back = np.real(np.fft.ifft(c * n))
    assert np.max(np.abs(back - f.values)) <= 1e-12 * np.max(np.abs(f.values))


# --- multipliers ------------------------------------------------------------


def test_bessel_examples(grid128):
    one = Field.constant(grid128, 1.0)
    assert np.allclose(bessel_apply(one, 3.7).values, 1.0)
    cos = fn(grid128, np.cos)
    assert np.allclose(bessel_apply(cos, 2).values, 2 * np.cos(grid128.x), atol=1e-14)
    assert np.allclose(bessel_apply(cos * 2, -2).values, np.cos(grid128.x), atol=1e-14)


def test_bessel_overflow_detected(grid128):
    with pytest.raises(OverflowError):
        bessel_apply(Field.zeros(grid128), 400.0)
    with pytest.raises(ValueError):
        bessel_apply(Field.zeros(grid128), math.inf)


def test_derivative_examples(grid128):
    x = grid128.x
    assert np.allclose(derivative(fn(grid128, np.sin)).values, np.cos(x), atol=1e-13)
    assert np.allclose(derivative(Field.constant(grid128, 1.0)).values, 0.0)
    d = derivative(fn(grid128, lambda x: np.cos(2 * x)))
    assert np.allclose(d.values, -2 * np.sin(2 * x), atol=1e-13)


def test_derivative_kills_nyquist():
    g = PeriodicGrid(8)
    nyq = fn(g, lambda x: np.cos(4 * x))
    assert np.allclose(derivative(nyq).values, 0.0)


def test_helmholtz_dx_examples(grid128):
    x = grid128.x
    assert np.allclose(helmholtz_multiplier_dx(fn(grid128, np.sin)).values, 0.5 * np.cos(x), atol=1e-14)
    got = helmholtz_multiplier_dx(fn(grid128, lambda x: np.sin(3 * x))).values
    assert np.allclose(got, 0.3 * np.cos(3 * x), atol=1e-14)
    assert np.allclose(helmholtz_multiplier_dx(Field.constant(grid128, 2.0)).values, 0.0)


# --- norms ------------------------------------------------------------------


@pytest.mark.parametrize("s", [-1.5, 0.0, 2.0, 3.3])
def test_norm_of_constant(grid128, s):
    assert sobolev_norm(Field.constant(grid128, 1.0), s) == pytest.approx(math.sqrt(2 * math.pi))


def test_norm_of_cos(grid128):
    cos = fn(grid128, np.cos)
    assert sobolev_norm(cos, 0) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert sobolev_norm(cos, 1) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-14)


@given(fields(), fields())
def test_plancherel(f, g):
    phys = l2_inner(f, g)
    spec = 2 * np.pi * np.real(np.sum(forward_spectrum(f) * np.conj(forward_spectrum(g))))
    scale = math.sqrt(l2_inner(f, f) * l2_inner(g, g))
    assert abs(phys - spec) <= 1e-10 * scale
    assert abs(sobolev_inner(f, g, 0.0) - phys) <= 1e-10 * scale


@given(fields(), st.sampled_from([-2.0, -1.0, 0.5, 1.0, 2.75]))
def test_bessel_round_trip(f, s):
    back = bessel_apply(bessel_apply(f, s), -s)
    assert sobolev_norm(back - f, 0) <= 1e-10 * sobolev_norm(f, 0)


@given(fields(), st.floats(-1.0, 3.0), st.floats(0.01, 0.5))
def test_interpolation_inequality(f, lo, width):
    hi = lo + 1.0
    mid = lo + width
    theta = (hi - mid) / (hi - lo)
    rhs = sobolev_norm(f, lo) ** theta * sobolev_norm(f, hi) ** (1 - theta)
    assert sobolev_norm(f, mid) <= rhs * (1 + 1e-12)


@given(fields(), st.floats(-1.0, 3.0))
def test_derivative_bound(f, s):
    assert sobolev_norm(derivative(f), s) <= sobolev_norm(f, s + 1) * (1 + 1e-12)


# --- mollifier --------------------------------------------------------------


@pytest.mark.parametrize("xi, expected", sorted(BUMP_COS_GOLDEN.items()))
def test_bump_transform_golden(xi, expected):
    assert bump_cosine_transform(xi) == pytest.approx(expected, abs=1e-12)


def test_mollifier_on_exponential_mode(grid128):
    m = mollifier_symbol(1.0, grid128)
    assert m[0] == 1.0
    assert m[1] == pytest.approx(BUMP_COS_GOLDEN[1.0], abs=1e-12)
    out = mollify(fn(grid128, np.cos), 1.0)
    assert np.allclose(out.values, BUMP_COS_GOLDEN[1.0] * np.cos(grid128.x), atol=1e-12)


def test_mollifier_preserves_constants(grid128):
    assert np.allclose(mollify(Field.constant(grid128, 3.0), 0.3).values, 3.0)


@pytest.mark.parametrize("eps", [0.0, -0.1])
def test_mollifier_rejects_nonpositive(grid128, eps):
    with pytest.raises(ValueError):
        mollify(Field.zeros(grid128), eps)


def test_symbol_bounded_and_cached(grid128):
    m = mollifier_symbol(0.37, grid128)
    assert np.all(np.abs(m) <= 1.0)
    assert mollifier_symbol(0.37, grid128) is m


def test_symbol_cache_thread_safe():
    g = PeriodicGrid(64)
    out = []
    threads = [threading.Thread(target=lambda: out.append(mollifier_symbol(0.123, g))) for _ in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(o is out[0] for o in out)


@given(fields(), fields(), st.sampled_from([0.05, 0.2, 0.7]))
def test_mollifier_self_adjoint(f, g, eps):
    a = l2_inner(mollify(f, eps), g)
    b = l2_inner(f, mollify(g, eps))
    assert abs(a - b) <= 1e-10 * (1 + abs(a))


@given(fields(), st.floats(-1.0, 4.0), st.sampled_from([0.05, 0.1, 0.4, 1.0]))
def test_mollifier_contraction(f, s, eps):
    assert sobolev_norm(mollify(f, eps), s) <= sobolev_norm(f, s) * (1 + 1e-12)


@given(fields(kmax=12), st.floats(0.0, 3.0))
def test_mollifier_convergence_monotone(f, s):
    gaps = [sobolev_norm(mollify(f, e) - f, s - 0.5) for e in (0.4, 0.2, 0.1, 0.05)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


# --- products ---------------------------------------------------------------


def test_product_examples(grid128):
    x = grid128.x
    cos, sin = fn(grid128, np.cos), fn(grid128, np.sin)
    assert np.allclose(product(cos, cos).values, (1 + np.cos(2 * x)) / 2, atol=1e-15)
    assert np.allclose(product(cos, sin).values, 0.5 * np.sin(2 * x), atol=1e-15)
    f = fn(grid128, lambda x: np.exp(np.sin(x)))
    assert np.allclose(product(f, Field.constant(grid128, 1.0)).values, f.values, atol=1e-14)


def test_product_exact_on_small_grid():
    g = PeriodicGrid(8)
    cos = fn(g, np.cos)
    assert np.allclose(product(cos, cos).values, (1 + np.cos(2 * g.x)) / 2, atol=1e-15)


def test_product_is_alias_free_for_high_modes():
    # cos(3x)^2 on 8 points: 2x padding keeps cos 6x out of the kept band
    g = PeriodicGrid(8)
    f = fn(g, lambda x: np.cos(3 * x))
    assert np.allclose(product(f, f).values, 0.5, atol=1e-15)


@given(fields(), fields())
def test_product_commutes(f, g):
    assert np.allclose(product(f, g).values, product(g, f).values, atol=1e-12)
