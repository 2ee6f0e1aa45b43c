"""Symmetric alpha-stable laws.

The characteristic function is ``psi(t) = exp(-(gamma |t|)**alpha)``, so
``alpha=2`` is a centred Gaussian with variance ``2 gamma**2`` and
``alpha=1`` is a Cauchy law with scale ``gamma``.

Densities, distribution functions and density derivatives are obtained by
Fourier inversion with adaptive oscillatory quadrature (QUADPACK's QAWF
through :func:`scipy.integrate.quad`).  Far in the tails, for ``alpha < 2``,
the classical convergent/asymptotic power series is used instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

__all__ = [
    "QuadratureError",
    "StableLaw",
    "stable_density",
    "stable_cdf",
    "stable_density_derivative",
    "stable_sample",
]

#: Absolute tolerance handed to the quadrature routines.
ABS_TOL = 1e-10
#: Error estimates above this are reported as non-convergence.
FAIL_TOL = 1e-7
#: Tail series is used for ``|x| >= TAIL_SWITCH * gamma`` when ``alpha < 2``.
TAIL_SWITCH = 40.0
_TAIL_TERMS = 40


class QuadratureError(RuntimeError):
    """Raised when a Fourier inversion integral does not converge.

    The achieved error estimate is stored on ``abserr``.
    """

    def __init__(self, msg: str, abserr: float):
        super().__init__(f"{msg} (error estimate {abserr:.3g})")
        self.abserr = abserr


@dataclass(frozen=True)
class StableLaw:
    """Symmetric alpha-stable law with characteristic function
    ``exp(-(gamma |t|)**alpha)``."""

    alpha: float
    gamma: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    def cf(self, t):
        return np.exp(-np.abs(self.gamma * np.asarray(t, dtype=float)) ** self.alpha)

    def log_cf(self, t):
        return -np.abs(self.gamma * np.asarray(t, dtype=float)) ** self.alpha

    def scaled(self, a: float) -> "StableLaw":
        """Law of ``a Z`` for ``a > 0``."""
        if a <= 0:
            raise ValueError("scale factor must be positive")
        return StableLaw(self.alpha, self.gamma * a)

    # vectorised conveniences
    def pdf(self, x):
        return _vectorize(stable_density, self, x)

    def cdf(self, x):
        return _vectorize(stable_cdf, self, x)

    def pdf_deriv(self, x):
        return _vectorize(stable_density_derivative, self, x)

    def sample(self, seed: int, count: int) -> np.ndarray:
        return stable_sample(self, seed, count)

    def tail_prob(self, x: float) -> float:
        """Leading-order ``P(|Z| > x)`` for large ``x``."""
        if self.alpha == 2.0:
            return float(special.erfc(x / (2.0 * self.gamma)))
        c = 2.0 / math.pi * math.gamma(self.alpha) * math.sin(math.pi * self.alpha / 2)
        return c * (self.gamma / x) ** self.alpha

    def quantile(self, p: float) -> float:
        if not 0.0 < p < 1.0:
            raise ValueError("p must be in (0, 1)")
        if p == 0.5:
            return 0.0
        if p < 0.5:
            return -self.quantile(1.0 - p)
        if self.alpha == 2.0:
            return math.sqrt(2.0) * self.gamma * float(special.ndtri(p))
        if self.alpha == 1.0:
            return self.gamma * math.tan(math.pi * (p - 0.5))
        hi = self.gamma
        while stable_cdf(self, hi) < p:
            hi *= 2.0
        return optimize.brentq(lambda x: stable_cdf(self, x) - p, 0.0, hi, xtol=1e-12)

    def iqr(self) -> float:
        return 2.0 * self.quantile(0.75)


def _vectorize(fn, law, x):
    x = np.asarray(x, dtype=float)
    out = np.array([fn(law, xi) for xi in x.ravel()])
    return out.reshape(x.shape) if x.ndim else float(out[0])


def _check(abserr: float, what: str):
    if not abserr <= FAIL_TOL:
        raise QuadratureError(f"{what} did not converge", abserr)


def _series_coeffs(alpha: float):
    k = np.arange(1, _TAIL_TERMS + 1)
    sign = np.where(k % 2 == 1, 1.0, -1.0)
    # log Gamma(alpha k + 1) - log k!, kept in log space to avoid overflow
    logmag = special.gammaln(alpha * k + 1) - special.gammaln(k + 1)
    return k, sign * np.sin(k * np.pi * alpha / 2), logmag


def _tail_series(law: StableLaw, x: float, kind: str) -> float:
    """Power series in ``|x|**-alpha``; convergent for alpha < 1, asymptotic
    otherwise (truncated at the smallest term)."""
    a, g = law.alpha, law.gamma
    ax = abs(x)
    k, trig, logmag = _series_coeffs(a)
    if kind == "pdf":
        logterm = logmag + a * k * math.log(g) - (a * k + 1) * math.log(ax)
    elif kind == "sf":
        logterm = logmag - np.log(a * k) + a * k * math.log(g) - a * k * math.log(ax)
    else:
        logterm = logmag + np.log(a * k + 1) + a * k * math.log(g) - (a * k + 2) * math.log(ax)
    mags = np.exp(logterm)
    if a > 1.0:
        stop = int(np.argmin(np.where(trig != 0, mags, np.inf))) + 1
        mags, trig = mags[:stop], trig[:stop]
    val = float(np.sum(trig * mags)) / math.pi
    if kind == "dpdf":
        return -math.copysign(val, x)
    return val


def _osc_quad(f, lo: float, u: float, alpha: float, kind: str):
    """``int_lo^inf f(s) cos|sin(u s) ds``.  QAWF misbehaves for small ``u``
    (it returns 0 with a tiny error estimate), so low frequencies use QAWO
    on the finite range where ``exp(-s**alpha)`` is above 1e-17."""
    if u >= 1.0:
        return integrate.quad(f, lo, np.inf, weight=kind, wvar=u, epsabs=ABS_TOL, limlst=200)
    hi = 40.0 ** (1.0 / alpha)
    return integrate.quad(f, lo, hi, weight=kind, wvar=u, epsabs=ABS_TOL, limit=500)


def _use_tail(law: StableLaw, x: float) -> bool:
    return law.alpha < 2.0 and abs(x) >= TAIL_SWITCH * law.gamma


def stable_density(law: StableLaw, x: float) -> float:
    """Density ``rho(x) = (1/pi) int_0^inf cos(t x) psi(t) dt``."""
    x = float(x)
    a, g = law.alpha, law.gamma
    if x == 0.0:
        return math.gamma(1.0 + 1.0 / a) / (math.pi * g)
    if _use_tail(law, x):
        return _tail_series(law, x, "pdf")
    # rescale so the integrand decays on the unit scale
    u = abs(x) / g
    val, err = _osc_quad(lambda s: math.exp(-s**a), 0.0, u, a, "cos")
    _check(err, f"stable density at x={x}")
    return max(val / (math.pi * g), 0.0)


def stable_cdf(law: StableLaw, x: float) -> float:
    """Distribution function ``1/2 + (1/pi) int_0^inf sin(t x) psi(t) / t dt``."""
    x = float(x)
    a, g = law.alpha, law.gamma
    if x == 0.0:
        return 0.5
    if _use_tail(law, x):
        sf = _tail_series(law, x, "sf")
        return 1.0 - sf if x > 0 else sf
    u = abs(x) / g
    # split at s = 1: the 1/s factor is removable near the origin
    head, e1 = integrate.quad(lambda s: u * np.sinc(u * s / math.pi) * math.exp(-s**a),
                              0.0, 1.0, epsabs=ABS_TOL, limit=200)
    tail, e2 = _osc_quad(lambda s: math.exp(-s**a) / s, 1.0, u, a, "sin")
    _check(e1 + e2, f"stable cdf at x={x}")
    half = (head + tail) / math.pi
    return 0.5 + half if x > 0 else 0.5 - half


def stable_density_derivative(law: StableLaw, x: float) -> float:
    """``rho'(x) = -(1/pi) int_0^inf t sin(t x) psi(t) dt``."""
    x = float(x)
    a, g = law.alpha, law.gamma
    if x == 0.0:
        return 0.0
    if _use_tail(law, x):
        return _tail_series(law, x, "dpdf")
    u = abs(x) / g
    val, err = _osc_quad(lambda s: s * math.exp(-s**a), 0.0, u, a, "sin")
    _check(err, f"stable density derivative at x={x}")
    return -math.copysign(val, x) / (math.pi * g * g)


def stable_sample(law: StableLaw, seed: int, count: int) -> np.ndarray:
    """Chambers-Mallows-Stuck variates (symmetric case)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.Generator(np.random.Philox(key=seed))
    a = law.alpha
    v = rng.uniform(-math.pi / 2, math.pi / 2, size=count)
    w = rng.standard_exponential(size=count)
    if a == 1.0:
        x = np.tan(v)
    else:
        x = (np.sin(a * v) / np.cos(v) ** (1.0 / a)
             * (np.cos((1.0 - a) * v) / w) ** ((1.0 - a) / a))
    return law.gamma * x
