import math

import numpy as np
import pytest
from scipy import integrate

from slowclt.fourier import (EnvelopeError, FrequencyOutOfRange, GridSpec, TailMassError,
                             compute_distribution, default_grid, law_distribution, log_cf_power,
                             self_convolve_check)
from slowclt.harness import limit_law
from slowclt.scaling import ScalingRule, parse_scaling
from slowclt.stable import StableLaw
from slowclt.summands import CubicTailFamily, PlainParetoFamily

CUBIC = CubicTailFamily(1.0)
NATURAL = parse_scaling("natural")


@pytest.fixture(scope="module")
def natural_grid():
    law = limit_law(CUBIC, NATURAL)
    return law, default_grid(CUBIC, NATURAL, [1e4, 2e4, 1e8], law)


def test_grid_spec():
    g = GridSpec(10.0, 2**14)
    assert g.dt == pytest.approx(math.pi / 10)
    assert g.x[g.points // 2] == 0.0
    assert g.x[0] == -10.0
    r = g.refined()
    assert r.points == 2**15 and r.x_max == g.x_max
    for bad in (lambda: GridSpec(0.0), lambda: GridSpec(1.0, 1000), lambda: GridSpec(1.0, 2**14, 1e9)):
        with pytest.raises(ValueError):
            bad()


@pytest.mark.parametrize("law", [StableLaw(2.0, 1.0), StableLaw(1.0, 1.0), StableLaw(1.5, 0.8)],
                         ids=["gauss", "cauchy", "1.5"])
def test_law_distribution_matches_closed_forms(law):
    grid = default_grid(None, None, [], law)
    d = law_distribution(law, grid, check=False)
    core = np.abs(d.x) <= 20 * law.gamma
    xs = d.x[core][::101]
    np.testing.assert_allclose(d.density[core][::101], law.pdf(xs), atol=1e-8)
    np.testing.assert_allclose(d.cdf[core][::101], law.cdf(xs), atol=1e-8)
    # off-grid evaluation sums the same series
    assert d.density_at(0.123) == pytest.approx(law.pdf(0.123), abs=1e-8)
    assert d.cdf_at(-0.777) == pytest.approx(law.cdf(-0.777), abs=1e-8)


def test_symmetry_mass_and_monotonicity(natural_grid):
    law, grid = natural_grid
    d = compute_distribution(CUBIC, NATURAL, 1e4, grid)
    assert d.validate() == []
    np.testing.assert_allclose(d.density[1:], d.density[1:][::-1], atol=1e-14)
    assert integrate.trapezoid(d.density, dx=grid.dx) == pytest.approx(1.0, abs=1e-9)
    assert np.all(np.diff(d.cdf) >= 0)
    assert d.cdf_at(0.0) == pytest.approx(0.5, abs=1e-14)
    assert d.diagnostics["tail_mass"] < 1e-7


def test_real_n_interpolates(natural_grid):
    # phi^n is a real power: n = 1.5e4 sits between n = 1e4 and n = 2e4
    law, grid = natural_grid
    rho = [compute_distribution(CUBIC, NATURAL, n, grid).density_at(0.0) for n in (1e4, 1.5e4, 2e4)]
    assert min(rho[0], rho[2]) < rho[1] < max(rho[0], rho[2])


def test_approach_to_limit_is_slow(natural_grid):
    # the peak error shrinks only logarithmically in n
    law, grid = natural_grid
    err = [abs(compute_distribution(CUBIC, NATURAL, n, grid).density_at(0.0) - law.pdf(0.0))
           for n in (1e4, 1e8)]
    assert err[1] < err[0] < 2 * err[1]


def test_n_two_pareto_against_convolution():
    # F_2(x) = P(X1 + X2 <= 2x) = int F(2x - y) f(y) dy, done by quadrature
    P = PlainParetoFamily(1.0)
    d = compute_distribution(P, ScalingRule(1.0, "constant"), 2, GridSpec(2000.0, 2**22), check=False)

    def F2(x):
        f = lambda y: P.cdf(2 * x - y) * P.density(y)
        pts = sorted({2 * x - 1, 2 * x + 1})
        hi = integrate.quad(f, 1, max(1.0, pts[-1]) + 10, points=[p for p in pts if p > 1], limit=500)[0]
        hi += integrate.quad(f, max(1.0, pts[-1]) + 10, np.inf, limit=500)[0]
        lo = integrate.quad(f, min(-1.0, pts[0]) - 10, -1, points=[p for p in pts if p < -1], limit=500)[0]
        lo += integrate.quad(f, -np.inf, min(-1.0, pts[0]) - 10, limit=500)[0]
        return lo + hi

    xs = [-3.0, -1.2, -1.0, -0.5, 0.0, 0.3, 1.0, 2.0, 5.0]
    err = max(abs(F2(x) - d.cdf_at(x)) for x in xs)
    assert err <= 1e-6


def test_n_one_recovers_summand():
    # n = 1 inverts the summand's own characteristic function; the density
    # has a jump and a 1/x^3 tail, so the grid error is ~1e-4 (see the notes)
    g = GridSpec(2000.0, 2**20)
    d = compute_distribution(CUBIC, NATURAL, 1, g, check=False)
    xs = np.array([-5.0, -2.0, -0.5, 0.0, 0.7, 3.0, 10.0])
    err = max(abs(d.cdf_at(x) - CUBIC.cdf(x)) for x in xs)
    assert err <= 5e-4


def test_self_convolution_identity():
    for law in (StableLaw(2.0, 1.0), StableLaw(1.0, 1.0)):
        grid = default_grid(None, None, [], law)
        d = law_distribution(law, grid, check=False)
        assert self_convolve_check(d, law) <= 1e-7


def test_errors():
    with pytest.raises(EnvelopeError):
        # too narrow a frequency band for n = 1e4
        compute_distribution(CUBIC, NATURAL, 1e4, GridSpec(50.0, 2**14, t_max=2.0))
    with pytest.raises(TailMassError):
        compute_distribution(CUBIC, NATURAL, 1e4, GridSpec(3.0, 2**16))
    with pytest.raises(ValueError):
        compute_distribution(CUBIC, NATURAL, 0, GridSpec(10.0))
    d = compute_distribution(CUBIC, NATURAL, 1e4, GridSpec(3.0, 2**16), check=False)
    assert any("tail mass" in v for v in d.diagnostics["violations"])
    with pytest.raises(FrequencyOutOfRange):
        # Pareto alpha = 1 has phi(2) = cos 2 - 2 (pi/2 - Si 2) < 0
        log_cf_power(PlainParetoFamily(1.0), 1.0, 1.5, [0.0, 2.0])


def test_log_cf_power_large_n():
    # n log phi(t/a_n) stays finite and tends to -(gamma t)^2 for n = 1e300
    a = math.sqrt(1e300 * math.log(1e300) / 2)
    v = log_cf_power(CUBIC, a, 1e300, 1.0)
    assert v == pytest.approx(-0.5, rel=2e-2)
