"""Slowly varying normalisations ``a_n = n^{1/alpha} L(n)``.

Everything here works on ``log n`` internally so that sequences such as
``n_k = 2^k`` with ``k`` up to a million, or ``n = 10^300``, are handled
without overflow.  ``n`` is a real parameter throughout.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field

import numpy as np

from .summands import (CubicTailFamily, ParetoLogFamily, PlainParetoFamily,
                       SummandFamily, _stable_constant)

__all__ = [
    "ScalingRule",
    "NoRootError",
    "CalibrationWarning",
    "solve_h",
    "solve_log_h",
    "c_n",
    "eval_L",
    "eval_a_n",
    "gap",
    "proposition_divergence",
    "calibrate_gamma",
    "limit_gamma",
    "matched_rule",
    "parse_scaling",
    "KINDS",
]

KINDS = ("constant", "power-log", "log-log", "implicit-h", "natural-nlogn", "custom-table")
_LOG2 = math.log(2.0)
_LOG_MIN_N = math.log(2.0)


class NoRootError(ValueError):
    """``h^2 = n log h`` has no root on the ``h -> inf`` branch."""


class CalibrationWarning(UserWarning):
    """Calibrated scale moved by more than the tolerance under doubling."""


def solve_log_h(log_n: float, tol: float = 1e-15, maxiter: int = 100) -> float:
    """Return ``u = log h`` for the larger root of ``h^2 = n log h``.

    Newton on ``g(u) = 2u - log u - log n``, safeguarded by the bracket
    ``[1/2, max(log n, 1)]``; ``g`` is increasing for ``u > 1/2``.
    """
    if not log_n > 1.0 + _LOG2:
        raise NoRootError(f"no root with h > sqrt(e) for n = exp({log_n}) <= 2e")
    lo, hi = 0.5, max(log_n, 1.0)
    u = 0.5 * (log_n + math.log(log_n) - _LOG2)
    if not lo < u < hi:
        u = 0.5 * (lo + hi)
    for _ in range(maxiter):
        g = 2.0 * u - math.log(u) - log_n
        if g > 0:
            hi = u
        else:
            lo = u
        step = g / (2.0 - 1.0 / u)
        nxt = u - step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - u) <= tol * nxt:
            return nxt
        u = nxt
    raise RuntimeError("Newton iteration for h did not converge")


def solve_h(n: float) -> float:
    """Larger root ``h`` of ``h^2 = n log h`` (the branch with ``h -> inf``)."""
    if not n > 0:
        raise NoRootError("n must be positive")
    return math.exp(solve_log_h(math.log(n)))


def c_n(log_n: float) -> float:
    """``h(n) / sqrt(n log n / 2) - 1`` from ``log n``."""
    u = solve_log_h(log_n)
    return math.expm1(u - 0.5 * (log_n + math.log(log_n) - _LOG2))


@dataclass(frozen=True)
class ScalingRule:
    """Normalising sequence ``a_n = n^{1/alpha} L(n)``.

    ``kind`` is one of :data:`KINDS`.  ``r`` is the power of ``log n`` for
    ``power-log``; ``table`` holds ``(n, L)`` pairs for ``custom-table``
    (log-log interpolation, flat extrapolation).
    """

    alpha: float = 2.0
    kind: str = "constant"
    r: float = 0.0
    table: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown scaling kind {self.kind!r}")
        if not 0 < self.alpha <= 2:
            raise ValueError("alpha must lie in (0, 2]")
        if self.kind in ("implicit-h", "natural-nlogn") and self.alpha != 2:
            raise ValueError(f"{self.kind} scaling requires alpha = 2")
        if self.kind == "custom-table" and len(self.table) < 2:
            raise ValueError("custom-table needs at least two (n, L) pairs")

    @property
    def spec(self) -> str:
        return {
            "constant": "const",
            "power-log": f"powerlog:r={self.r!r}",
            "log-log": "loglog",
            "implicit-h": "kk",
            "natural-nlogn": "natural",
            "custom-table": "table",
        }[self.kind]

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant" or (self.kind == "power-log" and self.r == 0)

    def _check(self, ln):
        ln = np.asarray(ln, dtype=float)
        if np.any(ln < _LOG_MIN_N - 1e-15):
            raise ValueError("scaling rules are defined for n >= 2")
        if self.kind == "log-log" and np.any(ln <= 1.0):
            raise ValueError("log-log rule needs n > e so that L(n) > 0")
        return ln

    def log_L(self, ln):
        """``log L(n)`` as a function of ``ln = log n``."""
        ln = self._check(ln)
        k = self.kind
        if k == "constant":
            return np.zeros_like(ln)
        if k == "power-log":
            return self.r * np.log(ln)
        if k == "log-log":
            return np.log(np.log(ln))
        if k == "natural-nlogn":
            return 0.5 * (np.log(ln) - _LOG2)
        if k == "implicit-h":
            u = np.vectorize(solve_log_h, otypes=[float])(ln)
            return u - 0.5 * ln
        tn = np.log([p[0] for p in self.table])
        tl = np.log([p[1] for p in self.table])
        return np.interp(ln, tn, tl)

    def log_a_n(self, ln):
        return np.asarray(ln, dtype=float) / self.alpha + self.log_L(ln)

    def gap_logn(self, ln):
        """``|1 - L(n)/L(2n)|`` as a function of ``log n``."""
        ln = self._check(ln)
        k = self.kind
        if self.is_constant:
            return np.zeros_like(ln)
        if k == "power-log":
            # 1 - (log n / log 2n)^r without cancellation
            return np.abs(np.expm1(self.r * np.log1p(-_LOG2 / (ln + _LOG2))))
        if k == "natural-nlogn":
            return np.abs(np.expm1(0.5 * np.log1p(-_LOG2 / (ln + _LOG2))))
        if k == "log-log":
            return np.abs(np.expm1(np.log(np.log(ln)) - np.log(np.log(ln + _LOG2))))
        return np.abs(np.expm1(self.log_L(ln) - self.log_L(ln + _LOG2)))


def _as_log(n):
    n = np.asarray(n, dtype=float)
    if np.any(n < 2):
        raise ValueError("scaling rules are defined for n >= 2")
    return np.log(n)


def _out(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def eval_L(rule: ScalingRule, n):
    """Slowly varying factor ``L(n)``."""
    return _out(np.exp(rule.log_L(_as_log(n))))


def eval_a_n(rule: ScalingRule, n):
    """Normaliser ``a_n``; ``h(n)`` for ``implicit-h``, ``sqrt(n log n / 2)`` for natural."""
    return _out(np.exp(rule.log_a_n(_as_log(n))))


def gap(rule: ScalingRule, n):
    """``|1 - L(n)/L(2n)|``."""
    return _out(rule.gap_logn(_as_log(n)))


def proposition_divergence(rule: ScalingRule, epsilon: float, k_max: int,
                           n0: float = 2.0) -> np.ndarray:
    """``(log n_k)^{1+eps} |1 - L(n_k)/L(2 n_k)|`` along ``n_k = 2^k n0``, k = 0..k_max.

    Only meaningful when ``L -> 0`` or ``L -> inf``; a constant rule yields
    zeros.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    ln = np.arange(k_max + 1) * _LOG2 + math.log(n0)
    return ln ** (1.0 + epsilon) * rule.gap_logn(ln)


def _scaled_sum_exponent(family: SummandFamily, rule: ScalingRule, t0: float, n: float) -> float:
    """``n * (1 - phi(t0 / a_n))`` evaluated in log space."""
    ln = math.log(n)
    a = math.exp(float(rule.log_a_n(ln)))
    return n * float(family.one_minus_cf(t0 / a))


def calibrate_gamma(family: SummandFamily, rule: ScalingRule, t0: float = 1.0,
                    n_cal: float = 1e12, tol: float = 1e-2) -> float:
    """Finite-``n`` scale estimate ``(n u(t0/a_n))^{1/alpha} / |t0|``.

    A :class:`CalibrationWarning` is emitted when doubling ``n_cal`` moves
    the estimate by more than ``tol`` (relative).
    """
    if t0 == 0:
        raise ValueError("t0 must be non-zero")
    t0 = abs(t0)
    a = rule.alpha
    g1 = _scaled_sum_exponent(family, rule, t0, n_cal) ** (1.0 / a) / t0
    g2 = _scaled_sum_exponent(family, rule, t0, 2.0 * n_cal) ** (1.0 / a) / t0
    if abs(g2 - g1) > tol * g1:
        warnings.warn(f"gamma calibration not converged: {g1:.6g} -> {g2:.6g} under doubling",
                      CalibrationWarning, stacklevel=2)
    return g1


def limit_gamma(family: SummandFamily, rule: ScalingRule) -> float:
    """Exact scale of the limit law of ``S_n / a_n``, from the tail constants.

    Raises ``ValueError`` when the rule does not normalise the family to a
    non-degenerate limit.
    """
    k = rule.kind
    if isinstance(family, CubicTailFamily):
        # n u(t/a_n) ~ (A t^2 / 4) n log n / a_n^2
        if rule.alpha != 2:
            raise ValueError("cubic-tail summands need alpha = 2")
        if k in ("natural-nlogn", "implicit-h"):
            return math.sqrt(family.A / 2.0)
        if k == "power-log" and rule.r == 0.5:
            return math.sqrt(family.A / 4.0)
        raise ValueError(f"{rule.spec} does not give a non-degenerate limit for {family.spec}")
    if isinstance(family, PlainParetoFamily):
        if rule.alpha != family.alpha or not rule.is_constant:
            raise ValueError(f"{family.spec} needs constant scaling with alpha={family.alpha}")
        ga = family.alpha * family.x0**family.alpha * _stable_constant(family.alpha)
        return float(ga ** (1.0 / family.alpha))
    if isinstance(family, ParetoLogFamily):
        r_needed = family.beta / family.alpha
        ok = rule.alpha == family.alpha and (
            (k == "power-log" and math.isclose(rule.r, r_needed, rel_tol=1e-12))
            or (r_needed == 0 and rule.is_constant))
        if not ok:
            raise ValueError(f"{family.spec} needs powerlog:r={r_needed!r} scaling")
        al, be = family.alpha, family.beta
        ga = 2.0 * family.norm * _stable_constant(al) * al ** (-be)
        return float(ga ** (1.0 / al))
    raise TypeError(f"no attraction constant known for {type(family).__name__}")


def matched_rule(family: SummandFamily) -> ScalingRule:
    """The power-log rule that normalises ``family`` to a stable limit."""
    if isinstance(family, CubicTailFamily):
        return ScalingRule(2.0, "natural-nlogn")
    if isinstance(family, PlainParetoFamily):
        return ScalingRule(family.alpha, "constant")
    return ScalingRule(family.alpha, "power-log", r=family.beta / family.alpha)


_SPEC_RE = re.compile(r"^(\w+)(?::(.*))?$")


def parse_scaling(spec: str, alpha: float = 2.0) -> ScalingRule:
    """Parse ``const``, ``powerlog:r=<real>``, ``loglog``, ``kk`` or ``natural``.

    An ``alpha=<real>`` parameter overrides the default exponent.
    """
    m = _SPEC_RE.match(spec.strip())
    if not m:
        raise ValueError(f"cannot parse scaling {spec!r}")
    name = m.group(1)
    params = {}
    if m.group(2):
        for item in m.group(2).split(","):
            key, _, val = item.partition("=")
            if not val:
                raise ValueError(f"malformed parameter {item!r}")
            params[key.strip()] = float(val)
    alpha = params.pop("alpha", alpha)
    kinds = {"const": "constant", "powerlog": "power-log", "loglog": "log-log",
             "kk": "implicit-h", "natural": "natural-nlogn"}
    if name not in kinds:
        raise ValueError(f"unknown scaling {name!r}")
    r = params.pop("r", 0.0)
    if name != "powerlog" and r:
        raise ValueError(f"{name} takes no r parameter")
    if params:
        raise ValueError(f"unexpected parameters {sorted(params)} for {name}")
    if name == "powerlog" and "r=" not in spec:
        raise ValueError("powerlog needs r=<real>")
    return ScalingRule(alpha, kinds[name], r=r)
