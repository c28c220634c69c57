import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossedfields import specfun
from crossedfields.errors import NonConvergence

from oracles import (gauss_legendre, hermite_direct, osc_density_direct,
                     series_erfc, sign_scan_zeros)

INV_SQRT2 = 1.0 / math.sqrt(2.0)


# --- Hermite polynomials ---------------------------------------------------

def test_hermite_basics():
    assert specfun.hermite_phys(0, 0.37) == 1.0
    assert abs(specfun.hermite_phys(2, INV_SQRT2)) < 1e-12
    assert specfun.hermite_phys(3, 1.0) == -4.0  # 8 x^3 - 12 x at x = 1


@pytest.mark.parametrize("k", range(9))
def test_hermite_matches_direct(k):
    xs = np.linspace(-4.0, 4.0, 41)
    mine = specfun.hermite_phys(k, xs)
    ref = hermite_direct(k, xs)
    scale = np.maximum(np.abs(ref), 1.0)
    assert np.max(np.abs(mine - ref) / scale) < 1e-12


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 20), st.floats(-6.0, 6.0))
def test_hermite_parity(k, x):
    left = specfun.hermite_phys(k, -x)
    right = (-1.0) ** k * specfun.hermite_phys(k, x)
    assert left == pytest.approx(right, rel=1e-10, abs=1e-9)


# --- oscillator densities --------------------------------------------------

def test_osc_density_anchors():
    assert specfun.osc_density(0, 0.0) == pytest.approx(1.0 / math.sqrt(math.pi), rel=1e-14)
    assert specfun.osc_density(1, 0.0) == 0.0
    assert specfun.osc_density(2, INV_SQRT2) < 1e-20


@pytest.mark.parametrize("k", [0, 1, 2, 5, 9])
def test_osc_density_matches_direct(k):
    xs = np.linspace(-5.0, 5.0, 37)
    assert np.allclose(specfun.osc_density(k, xs), osc_density_direct(k, xs),
                       rtol=1e-12, atol=1e-280)


@pytest.mark.parametrize("k", range(13))
def test_osc_density_normalized_small_k(k):
    # independent composite Gauss-Legendre over the envelope support
    edge = math.sqrt(2.0 * k + 1.0) + 9.0
    total = sum(gauss_legendre(lambda x: specfun.osc_density(k, x), a, a + 1.0, n=40)
                for a in np.arange(-edge, edge, 1.0))
    assert total == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("k", [0, 7, 18, 25, 33, 40])
def test_osc_density_normalized_to_k40(k):
    edge = math.sqrt(2.0 * k + 1.0) + 10.0
    total = specfun.integrate_adaptive(
        lambda x: specfun.osc_density(k, x), -edge, edge, tol=1e-11)
    assert total == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 200), st.floats(-25.0, 25.0))
def test_osc_density_stable(k, xi):
    val = specfun.osc_density(k, xi)
    assert math.isfinite(val)
    assert 0.0 <= val <= 1.0


def test_osc_density_huge_level_and_argument():
    # scaled recurrence keeps extreme cases finite
    assert 0.0 <= specfun.osc_density(5000, 99.5) <= 1.0
    assert specfun.osc_density(1200, 80.0) >= 0.0
    assert specfun.osc_density(3, 40.0) == 0.0  # underflows cleanly


def test_osc_density_vanishes_on_zeros():
    for k in range(1, 11):
        for z in specfun.hermite_zeros(k).zeros:
            assert specfun.osc_density(k, z) < 1e-20


# --- cumulative oscillator integral ----------------------------------------

def test_osc_cumulative_anchors():
    assert specfun.osc_cumulative(0, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert specfun.osc_cumulative(7, 0.0) == pytest.approx(0.5, abs=1e-13)
    # golden interval weight of level 2 below its lower node
    assert specfun.osc_cumulative(2, -INV_SQRT2) == pytest.approx(
        0.4006259784506004, abs=1e-12)


@pytest.mark.parametrize("k,xi", [(1, -0.4), (3, 1.2), (6, -2.3), (12, 0.9), (24, -4.0)])
def test_osc_cumulative_matches_quadrature(k, xi):
    edge = math.sqrt(2.0 * k + 1.0) + 9.0
    ref = sum(gauss_legendre(lambda x: specfun.osc_density(k, x), a, min(a + 1.0, xi), n=60)
              for a in np.arange(-edge, xi, 1.0))
    assert specfun.osc_cumulative(k, xi) == pytest.approx(ref, abs=1e-11)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 60), st.floats(-12.0, 12.0), st.floats(1e-3, 3.0))
def test_osc_cumulative_monotone(k, xi, step):
    lo = specfun.osc_cumulative(k, xi)
    hi = specfun.osc_cumulative(k, xi + step)
    assert hi >= lo - 1e-13
    assert -1e-15 <= lo <= 1.0 + 1e-13


# --- Hermite zeros ----------------------------------------------------------

def test_zeros_small_orders():
    assert specfun.hermite_zeros(0).zeros == ()
    assert specfun.hermite_zeros(1).zeros == (0.0,)
    z2 = specfun.hermite_zeros(2).zeros
    assert z2[0] == pytest.approx(-INV_SQRT2, abs=1e-14)
    assert z2[1] == pytest.approx(+INV_SQRT2, abs=1e-14)


@pytest.mark.parametrize("k", [3, 5, 8, 13])
def test_zeros_against_sign_scan(k):
    ref = sign_scan_zeros(k)
    mine = specfun.hermite_zeros(k).zeros
    assert len(mine) == len(ref) == k
    for a, b in zip(mine, ref):
        assert a == pytest.approx(b, abs=1e-12)


def test_zeros_symmetry_and_odd_center():
    for k in range(1, 26):
        zs = specfun.hermite_zeros(k).zeros
        assert len(zs) == k
        for lo, hi in zip(zs, reversed(zs)):
            assert lo == pytest.approx(-hi, abs=1e-13)
        if k % 2 == 1:
            assert 0.0 in zs


@settings(max_examples=120, deadline=None)
@given(st.integers(1, 40))
def test_zeros_interlace(k):
    inner = specfun.hermite_zeros(k).zeros
    outer = specfun.hermite_zeros(k + 1).zeros
    for j in range(k):
        assert outer[j] < inner[j] < outer[j + 1]


# --- Laguerre ---------------------------------------------------------------

def test_laguerre_values():
    assert specfun.laguerre(0, 3.2) == 1.0
    assert specfun.laguerre(1, 1.0) == 0.0
    assert specfun.laguerre(2, 2.0) == pytest.approx(-1.0, rel=1e-14)  # 1 - 2x + x^2/2
    xs = np.linspace(0.0, 8.0, 17)
    assert np.allclose(specfun.laguerre(2, xs), 1 - 2 * xs + xs ** 2 / 2, rtol=1e-13)


# --- erfc -------------------------------------------------------------------

def test_erfc_against_series():
    # the series oracle itself cancels catastrophically past x ~ 2.5, so the
    # strict relative comparison stays inside its reliable range
    for x in (0.0, 0.25, INV_SQRT2, 1.0, 1.5, 2.0):
        assert specfun.erfc(x) == pytest.approx(series_erfc(x), rel=1e-12, abs=1e-15)
    assert specfun.erfc(3.5) == pytest.approx(series_erfc(3.5), abs=1e-12)
    assert specfun.erfc(0.0) == 1.0
    assert specfun.erfc(INV_SQRT2) == pytest.approx(0.3173105078629141, rel=1e-12)


@settings(max_examples=150, deadline=None)
@given(st.floats(-10.0, 10.0))
def test_erfc_reflection(x):
    assert specfun.erfc(-x) == pytest.approx(2.0 - specfun.erfc(x), rel=1e-12, abs=1e-12)


# --- Airy -------------------------------------------------------------------

# reference values from a 30-digit arbitrary-precision evaluation
AIRY_POINTS = [
    (0.0, 0.35502805388781724),
    (0.5, 0.23169360648083349),
    (-1.0, 0.53556088329235212),
    (-3.0, -0.37881429367765807),
    (5.0, 1.0834442813607442e-4),
    (-8.0, -0.052705050356386203),
    (-25.0, 0.16352657883042947),
    (12.0, 1.3931846888753608e-13),
]
AI1_POINTS = [
    (0.5, 0.14595330491185718),
    (-1.0, -0.46567398346706861),
    (2.0, 0.31253275578067969),
    (-3.0, -0.80146284267132346),
    (-8.0, -0.78398259657117734),
    (-25.0, -0.70489539076334898),
    (12.0, 0.33333333333329380),
]


@pytest.mark.parametrize("z,ref", AIRY_POINTS)
def test_airy_ai_values(z, ref):
    assert specfun.airy_ai(z) == pytest.approx(ref, abs=5e-13)


@pytest.mark.parametrize("z,ref", AI1_POINTS)
def test_airy_ai1_values(z, ref):
    assert specfun.airy_ai1(z) == pytest.approx(ref, abs=1e-10)


def test_airy_ai1_sentinels():
    assert specfun.airy_ai1(0.0) == 0.0
    assert specfun.airy_ai1(math.inf) == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert specfun.airy_ai1(-math.inf) == pytest.approx(-2.0 / 3.0, abs=1e-15)
    # deep tails approach the sentinels: quadrature route and asymptotic route
    assert specfun.airy_ai1(40.0) == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert specfun.airy_ai1(-650.0) == pytest.approx(-2.0 / 3.0, abs=0.06)


def test_airy_ai1_consistent_with_quadrature():
    direct = specfun.integrate_adaptive(specfun.airy_ai, 0.0, 40.0, tol=1e-12)
    assert direct == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert specfun.airy_ai1(-2.2) == pytest.approx(
        -specfun.integrate_adaptive(specfun.airy_ai, -2.2, 0.0, tol=1e-12), abs=1e-11)


@settings(max_examples=120, deadline=None)
@given(st.floats(0.0, 10.0), st.floats(1e-3, 4.0))
def test_airy_ai1_monotone_on_positive_axis(a, step):
    # d/dz Ai1 = Ai > 0 for z > 0
    assert specfun.airy_ai1(a + step) > specfun.airy_ai1(a)


# --- adaptive quadrature ----------------------------------------------------

def test_integrate_constants_and_gaussian():
    assert specfun.integrate_adaptive(lambda x: np.ones_like(x), 0.0, 2.0, tol=1e-10) \
        == pytest.approx(2.0, abs=1e-12)
    gauss = specfun.integrate_adaptive(lambda x: np.exp(-x * x), -8.0, 8.0, tol=1e-10)
    assert gauss == pytest.approx(math.sqrt(math.pi), abs=1e-10)


def test_integrate_scalar_callable_fallback():
    val = specfun.integrate_adaptive(lambda x: float(x) ** 2, 0.0, 3.0, tol=1e-10)
    assert val == pytest.approx(9.0, abs=1e-9)


def test_integrate_validates_bounds():
    with pytest.raises(ValueError):
        specfun.integrate_adaptive(lambda x: x, 1.0, 0.0, tol=1e-8)
    with pytest.raises(ValueError):
        specfun.integrate_adaptive(lambda x: x, 0.0, 1.0, tol=0.0)
    assert specfun.integrate_adaptive(lambda x: x, 2.0, 2.0, tol=1e-8) == 0.0


def test_integrate_reports_nonconvergence():
    # a capped depth cannot localize the jump to the requested accuracy
    jump = lambda x: np.where(x > 1 / math.pi, 1.0, 0.0)
    with pytest.raises(NonConvergence) as info:
        specfun.integrate_adaptive(jump, 0.0, 1.0, tol=1e-15, max_depth=20)
    assert info.value.error is not None


def test_level_index_validation():
    for fn in (specfun.hermite_phys, specfun.osc_density, specfun.laguerre):
        with pytest.raises(ValueError):
            fn(-1, 0.3)
    with pytest.raises(ValueError):
        specfun.hermite_zeros(-2)
