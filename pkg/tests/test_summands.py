import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from slowclt.summands import CubicTailFamily, ParetoLogFamily, PlainParetoFamily, parse_family

FAMILIES = [CubicTailFamily(1.0), CubicTailFamily(4.0), PlainParetoFamily(1.0),
            PlainParetoFamily(1.5), PlainParetoFamily(0.6), ParetoLogFamily(1.5, 1.0),
            ParetoLogFamily(0.8, 2.5)]
T = [1e-9, 1e-6, 1e-3, 0.05, 0.3, 1.0, 3.0, 7.0, 8.0, 8.5, 40.0]
# either side of the switch to the rotated contour, plus both extremes
T_ORACLE = [1e-9, 1e-3, 0.3, 3.0, 7.9, 8.1, 40.0]


def mp_one_minus_cf(fam, t):
    """Independent ``1 - E cos(tX)`` at 25 digits: mpmath quad on the body,
    ``quadosc`` on the far tail."""
    mp.mp.dps = 25
    t = mp.mpf(t)
    inner = 0
    if isinstance(fam, CubicTailFamily):
        A = mp.mpf(fam.A)
        x0 = mp.sqrt(mp.mpf(1.5) * A)
        f = lambda x: A / (2 * x**3)
        inner = 2 * mp.quad(lambda x: 2 * mp.sin(t * x / 2) ** 2 * A / (2 * x0**3), [0, x0])
    elif isinstance(fam, PlainParetoFamily):
        a, x0 = mp.mpf(fam.alpha), mp.mpf(fam.x0)
        f = lambda x: a * x0**a / 2 * x ** (-a - 1)
    else:
        a, b, x0 = mp.mpf(fam.alpha), mp.mpf(fam.beta), mp.e
        c = 1 / (2 * mp.quad(lambda x: x ** (-a - 1) * mp.log(x) ** b, [x0, mp.inf]))
        f = lambda x: c * x ** (-a - 1) * mp.log(x) ** b
    X = max(x0, 50 / t)
    body = 0
    if X > x0:
        pts = mp.linspace(mp.log(x0), mp.log(X), 40)
        body = 2 * mp.quad(lambda v: 2 * mp.sin(t * mp.exp(v) / 2) ** 2 * f(mp.exp(v)) * mp.exp(v), pts)
    mass = 2 * mp.quad(f, [X, mp.inf])
    # explicit zeros keep every node above X, where f is real
    osc = 2 * mp.quadosc(lambda x: f(x) * mp.cos(t * x), [X, mp.inf],
                         zeros=lambda k: X + k * mp.pi / t)
    return float(inner + body + mass - osc)


@pytest.mark.parametrize("t", T + [1e-12, 1e3])
def test_pareto_unit_closed_form(t):
    # 1 - phi(t) = 1 - cos t + t (pi/2 - Si(t)) for density |x|^-2 / 2 on |x| >= 1
    si = special.sici(t)[0]
    exact = 2 * math.sin(t / 2) ** 2 + t * (math.pi / 2 - si)
    assert PlainParetoFamily(1.0).one_minus_cf(t) == pytest.approx(exact, rel=1e-11)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.spec)
def test_one_minus_cf_against_quadrature(fam):
    got = fam.one_minus_cf(np.array(T_ORACLE))
    ref = np.array([mp_one_minus_cf(fam, t) for t in T_ORACLE])
    np.testing.assert_allclose(got, ref, rtol=1e-11)


def test_cubic_small_t_expansion():
    # 1 - phi(t) = (A/2) t^2 log(1/t) + c t^2 + o(t^2); the difference
    # quotient in log t isolates A/2
    fam = CubicTailFamily(1.0)
    t1, t2 = 1e-8, 1e-9
    u1, u2 = fam.one_minus_cf(t1) / t1**2, fam.one_minus_cf(t2) / t2**2
    assert (u2 - u1) / math.log(10) == pytest.approx(fam.A / 2, rel=1e-6)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.spec)
def test_density_normalised_and_tail_exact(fam):
    f = fam.density
    body = integrate.quad(f, 0, fam.x0, limit=200)[0] if fam.x0 > 0 else 0.0
    # the tail formula is the integral of the density
    for x in (fam.x0, 2.5 * fam.x0, 40.0 * fam.x0):
        num = 2 * integrate.quad(lambda v: f(math.exp(v)) * math.exp(v), math.log(x), 230,
                                 epsabs=0, epsrel=1e-12, limit=500)[0]
        assert fam.tail(x) == pytest.approx(num, rel=1e-9)
    assert 2 * body + fam.tail(fam.x0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.spec)
def test_cdf_and_quantile(fam):
    x = np.array([-50.0, -fam.x0, -0.3, 0.0, 0.3, fam.x0, 7.0, 1e6])
    F = fam.cdf(x)
    assert np.all(np.diff(F) >= 0)
    np.testing.assert_allclose(F + fam.cdf(-x), 1.0, atol=1e-15)
    u = np.array([1e-9, 0.01, 0.2, 0.5, 0.77, 0.999])
    np.testing.assert_allclose(fam.cdf(fam.quantile(u)), u, rtol=1e-10, atol=1e-12)


def test_tail_rejects_body():
    with pytest.raises(ValueError):
        CubicTailFamily(1.0).tail(0.5)
    with pytest.raises(ValueError):
        ParetoLogFamily(1.5, 1.0).tail(2.0)


def test_invalid_parameters():
    for bad in (lambda: CubicTailFamily(0.0), lambda: PlainParetoFamily(2.0),
                lambda: PlainParetoFamily(1.0, x0=-1), lambda: ParetoLogFamily(1.5, -1.0)):
        with pytest.raises(ValueError):
            bad()


def test_cubic_geometry():
    fam = CubicTailFamily(1.0)
    assert fam.x0 == pytest.approx(math.sqrt(1.5))
    # two thirds of the mass sit in the flat centre
    assert 1 - fam.tail(fam.x0) == pytest.approx(2 / 3)
    # truncated variance grows like A log x
    tv = fam.truncated_variance
    assert tv(1e6) - tv(1e3) == pytest.approx(fam.A * math.log(1e3), rel=1e-12)


def test_sampling_is_deterministic():
    fam = CubicTailFamily(1.0)
    a, b = fam.sample(5, 1000), fam.sample(5, 1000)
    np.testing.assert_array_equal(a, b)
    assert np.mean(np.abs(a) > fam.x0) == pytest.approx(1 / 3, abs=0.05)


def test_parse_family_roundtrip():
    for fam in FAMILIES:
        assert parse_family(fam.spec) == fam
    assert parse_family("cubic") == CubicTailFamily(1.0)
    assert parse_family("pareto:alpha=1.2,x0=2").spec == "pareto:alpha=1.2,x0=2.0"
    assert parse_family(PlainParetoFamily(0.8, 3.0).spec) == PlainParetoFamily(0.8, 3.0)
    for bad in ("gauss", "cubic:B=2", "pareto:alpha", "pareto:alpha=x"):
        with pytest.raises(ValueError):
            parse_family(bad)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FAMILIES), st.floats(1e-10, 1e4))
def test_one_minus_cf_range(fam, t):
    u = fam.one_minus_cf(t)
    assert 0 < u <= 2
    assert fam.one_minus_cf(-t) == u
    assert fam.cf(t) == pytest.approx(1 - u, abs=1e-15)
