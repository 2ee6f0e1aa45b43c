import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slowclt.scaling import (CalibrationWarning, NoRootError, ScalingRule, c_n, calibrate_gamma,
                             eval_a_n, eval_L, gap, limit_gamma, matched_rule, parse_scaling,
                             proposition_divergence, solve_h, solve_log_h)
from slowclt.summands import CubicTailFamily, ParetoLogFamily, PlainParetoFamily

LN300 = 300 * math.log(10)


def mp_log_h(log_n):
    """Root of 2u - log u = log n at 40 digits, bracketed away from the small root."""
    mp.mp.dps = 40
    ln = mp.mpf(log_n)
    return mp.findroot(lambda u: 2 * u - mp.log(u) - ln, (mp.mpf(0.5) + 1e-30, ln), solver="anderson")


def test_solve_h_at_e_squared():
    assert solve_h(math.e**2) == pytest.approx(math.e, abs=1e-10)


@pytest.mark.parametrize("log_n", [2.0, 5.0, 30.0, 700.0, LN300, 1e5])
def test_solve_log_h_against_mpmath(log_n):
    assert solve_log_h(log_n) == pytest.approx(float(mp_log_h(log_n)), rel=1e-14)


def test_solve_h_no_root():
    with pytest.raises(NoRootError):
        solve_h(5.0)
    with pytest.raises(NoRootError):
        solve_h(-1.0)
    assert solve_h(6.0) ** 2 == pytest.approx(6.0 * math.log(solve_h(6.0)))


def test_c_n_log_log_asymptotics():
    # h(n) / sqrt(n log n / 2) - 1 ~ log log n / (2 log n)
    v = c_n(LN300) * 2 * LN300 / math.log(LN300)
    assert 0.8 < v < 1.2
    u = mp_log_h(LN300)
    ref = mp.expm1(u - (mp.mpf(LN300) + mp.log(LN300) - mp.log(2)) / 2)
    assert c_n(LN300) == pytest.approx(float(ref), rel=1e-9)


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_power_log_gap_limit(r):
    rule = ScalingRule(2.0, "power-log", r=r)
    assert LN300 * gap(rule, 1e300) == pytest.approx(r * math.log(2), rel=1e-2)
    # no cancellation: exact at moderate n
    n = 1e6
    exact = 1 - (math.log(n) / math.log(2 * n)) ** r
    assert gap(rule, n) == pytest.approx(exact, rel=1e-12)


def test_natural_gap_limit():
    rule = parse_scaling("natural")
    assert LN300 * gap(rule, 1e300) == pytest.approx(math.log(2) / 2, rel=1e-2)


def test_proposition_divergence():
    rule = parse_scaling("powerlog:r=0.5")
    # index j corresponds to n = 2^(j+1)
    seq = proposition_divergence(rule, 0.1, 10**6 - 1, n0=2.0)
    assert np.maximum.accumulate(seq)[-1] > 3 * seq[9]
    flat = proposition_divergence(rule, 0.0, 10**6 - 1, n0=2.0)
    assert flat[-1] == pytest.approx(math.log(2) / 2, rel=1e-5)
    assert np.all(np.diff(flat) > 0) and flat[-1] < math.log(2) / 2
    assert np.all(proposition_divergence(parse_scaling("const"), 0.5, 50) == 0)
    with pytest.raises(ValueError):
        proposition_divergence(rule, -0.1, 5)


def test_proposition_running_max_exceeds_10():
    # (log n)^0.1 * gap ~ (log 2 / 2) (log n)^0.1, so the sequence passes 10 near
    # log n = (20 / log 2)^10; k = 2^50 is far beyond enumeration but the gap is log-space
    rule = parse_scaling("powerlog:r=0.5")
    ln2 = math.log(2)

    def term(k):
        ln = k * ln2
        return ln**1.1 * float(rule.gap_logn(ln))

    def oracle(k):
        with mp.workdps(40):
            ln = mp.mpf(k) * mp.log(2)
            return float(ln**mp.mpf("1.1") * (1 - mp.sqrt(ln / (ln + mp.log(2)))))

    k_star = math.ceil((20 / ln2) ** 10 / ln2)
    for k in (40, 10**6, k_star, 4 * k_star):
        assert term(k) == pytest.approx(oracle(k), rel=1e-12)
    assert term(k_star) > 10 > term(k_star // 4)


def test_a_n_values():
    assert eval_a_n(parse_scaling("const", 1.0), 1e3) == pytest.approx(1e3)
    assert eval_a_n(parse_scaling("natural"), 1e4) == pytest.approx(math.sqrt(1e4 * math.log(1e4) / 2))
    assert eval_a_n(parse_scaling("kk"), 1e8) == pytest.approx(solve_h(1e8), rel=1e-14)
    assert eval_L(parse_scaling("powerlog:r=0.5"), math.e**4) == pytest.approx(2.0)
    assert eval_L(parse_scaling("loglog"), math.exp(math.e)) == pytest.approx(1.0)
    # large n through the log-space path
    assert np.isfinite(eval_a_n(parse_scaling("powerlog:r=2,alpha=1.5"), 1e300))
    np.testing.assert_allclose(eval_L(parse_scaling("powerlog:r=1"), [math.e, math.e**2]), [1, 2])


def test_table_rule():
    rule = ScalingRule(2.0, "custom-table", table=((10.0, 1.0), (1000.0, 4.0)))
    assert eval_L(rule, 100.0) == pytest.approx(2.0)
    assert eval_L(rule, 1e6) == pytest.approx(4.0)


def test_domain_errors():
    with pytest.raises(ValueError):
        eval_a_n(parse_scaling("const"), 1.0)
    with pytest.raises(ValueError):
        eval_L(parse_scaling("loglog"), 2.0)
    with pytest.raises(ValueError):
        ScalingRule(1.5, "implicit-h")
    with pytest.raises(ValueError):
        ScalingRule(2.0, "custom-table", table=((10.0, 1.0),))
    with pytest.raises(ValueError):
        ScalingRule(2.5)


@pytest.mark.parametrize("spec", ["const", "powerlog:r=0.5", "loglog", "kk", "natural",
                                  "powerlog:r=0.6666666666666666"])
def test_parse_roundtrip(spec):
    assert parse_scaling(spec).spec == spec


@pytest.mark.parametrize("bad", ["", "powerlog", "powerlog:r", "kk:r=1", "sqrt", "powerlog:r=x"])
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse_scaling(bad)


def test_limit_gamma():
    cubic = CubicTailFamily(1.0)
    assert limit_gamma(cubic, parse_scaling("natural")) == pytest.approx(math.sqrt(0.5))
    assert limit_gamma(cubic, parse_scaling("kk")) == pytest.approx(math.sqrt(0.5))
    assert limit_gamma(cubic, parse_scaling("powerlog:r=0.5")) == pytest.approx(0.5)
    # Pareto alpha = 1 with x0 = 1: 1 - phi(t) ~ (pi/2)|t|
    assert limit_gamma(PlainParetoFamily(1.0), parse_scaling("const", 1.0)) == pytest.approx(math.pi / 2)
    with pytest.raises(ValueError):
        limit_gamma(cubic, parse_scaling("const"))
    with pytest.raises(ValueError):
        limit_gamma(ParetoLogFamily(1.5, 1.0), parse_scaling("powerlog:r=0.5", 1.5))


@pytest.mark.parametrize("fam", [CubicTailFamily(1.0), PlainParetoFamily(1.3),
                                 ParetoLogFamily(1.5, 1.0)], ids=lambda f: f.spec)
def test_limit_gamma_matches_finite_n_trend(fam):
    # the finite-n calibration approaches the analytic constant as n grows
    rule = matched_rule(fam)
    g = limit_gamma(fam, rule)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CalibrationWarning)
        errs = [abs(calibrate_gamma(fam, rule, n_cal=n) / g - 1) for n in (1e6, 1e12, 1e50)]
    assert errs[2] < errs[1] < errs[0] or errs[2] < 1e-12
    assert errs[2] < 0.05


def test_calibration_warning():
    fam = ParetoLogFamily(1.5, 1.0)
    with pytest.warns(CalibrationWarning):
        calibrate_gamma(fam, matched_rule(fam), n_cal=1e4, tol=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.floats(2.0, 1e250), st.sampled_from(["powerlog:r=0.5", "powerlog:r=-1", "natural", "kk"]))
def test_gap_is_small_and_nonnegative(n, spec):
    rule = parse_scaling(spec)
    g = gap(rule, max(n, 16.0))
    assert 0 <= g < 1
