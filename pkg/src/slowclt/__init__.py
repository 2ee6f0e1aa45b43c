"""Exact finite-n laws of heavy-tailed sums under slowly varying
normalisations, and numerical checks of lower bounds on their distance
to the stable limit."""

__version__ = "0.1.0"

from .stable import StableLaw, stable_cdf, stable_density, stable_density_derivative, stable_sample
from .summands import CubicTailFamily, ParetoLogFamily, PlainParetoFamily, parse_family
from .scaling import ScalingRule, eval_L, eval_a_n, gap, parse_scaling, solve_h
from .fourier import GridSpec, SampledDistribution, compute_distribution, law_distribution
from .metrics import kolmogorov, sup_density_distance

__all__ = [
    "StableLaw",
    "stable_density",
    "stable_cdf",
    "stable_density_derivative",
    "stable_sample",
    "CubicTailFamily",
    "PlainParetoFamily",
    "ParetoLogFamily",
    "parse_family",
    "ScalingRule",
    "eval_L",
    "eval_a_n",
    "gap",
    "parse_scaling",
    "solve_h",
    "GridSpec",
    "SampledDistribution",
    "compute_distribution",
    "law_distribution",
    "kolmogorov",
    "sup_density_distance",
]
