import math

import numpy as np
import pytest
from scipy import stats

from slowclt.montecarlo import (EmpiricalCDF, McConfig, crosscheck, dkw_half_width,
                                empirical_scaled_sum_cdf, ks_against, replicate_sums,
                                symmetry_statistic)
from slowclt.scaling import parse_scaling
from slowclt.summands import CubicTailFamily, PlainParetoFamily

CUBIC = CubicTailFamily(1.0)


def test_dkw_half_width():
    assert dkw_half_width(10**5, 0.999) == pytest.approx(math.sqrt(math.log(2000) / 2e5))
    assert McConfig(10, 10**4, confidence=0.95).half_width == pytest.approx(
        math.sqrt(math.log(40) / 2e4))


def test_config_validation():
    for bad in (dict(n=0, m=10**4), dict(n=10**6, m=10**4), dict(n=10, m=100),
                dict(n=10, m=10**4, confidence=1.0)):
        with pytest.raises(ValueError):
            McConfig(**bad)


def test_replicates_are_split_invariant():
    whole = replicate_sums(CUBIC, 50, 7, 0, 40)
    parts = np.concatenate([replicate_sums(CUBIC, 50, 7, 0, 13), replicate_sums(CUBIC, 50, 7, 13, 40)])
    np.testing.assert_array_equal(whole, parts)
    assert not np.array_equal(whole, replicate_sums(CUBIC, 50, 8, 0, 40))


def test_empirical_cdf_deterministic():
    cfg = McConfig(20, 10**4, seed=3)
    rule = parse_scaling("natural")
    a = empirical_scaled_sum_cdf(CUBIC, rule, cfg)
    b = empirical_scaled_sum_cdf(CUBIC, rule, cfg)
    np.testing.assert_array_equal(a.values, b.values)
    assert a(np.inf) == 1.0 and a(-np.inf) == 0.0
    assert a.a_n == pytest.approx(math.sqrt(20 * math.log(20) / 2))


def test_ks_statistic_matches_scipy():
    x = np.sort(np.random.default_rng(0).standard_normal(5000))
    emp = EmpiricalCDF(x, 1.0, McConfig(1, 10**4))
    assert ks_against(emp, stats.norm.cdf) == pytest.approx(stats.kstest(x, "norm").statistic, abs=1e-15)


def test_symmetry_statistic():
    x = np.random.default_rng(1).standard_normal(20000)
    assert symmetry_statistic(x) < 2 * dkw_half_width(20000, 0.999)
    assert symmetry_statistic(np.abs(x) + 0.1) == 1.0


def test_single_summand():
    r = crosscheck(CUBIC, parse_scaling("natural"), McConfig(1, 2 * 10**4, seed=2))
    assert r.passed and r.symmetric and r.grid_tol == 0.0


@pytest.mark.slow
def test_pareto_and_negative_control():
    fam, rule = PlainParetoFamily(1.0), parse_scaling("const", 1.0)
    ok = crosscheck(fam, rule, McConfig(100, 2 * 10**4, seed=4))
    assert ok.passed and ok.symmetric
    bad = crosscheck(fam, rule, McConfig(100, 2 * 10**4, seed=4), a_scale=1.5)
    assert not bad.passed and bad.pipeline_bug
