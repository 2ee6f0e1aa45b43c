"""The gap |1 - L(n)/L(2n)| of slowly varying normalisations.

A lower bound on the distance to the limit is proportional to this gap,
so its decay sets the best possible rate: for L = (log n)^r it is
r log 2 / log n.
"""
import math

import numpy as np

from slowclt import gap, parse_scaling
from slowclt.scaling import proposition_divergence, solve_h

for spec in ("powerlog:r=0.5", "powerlog:r=2", "natural", "kk", "loglog"):
    rule = parse_scaling(spec)
    row = [gap(rule, 10.0**k) * k * math.log(10) for k in (4, 12, 50, 300)]
    print(f"{spec:16s}", "  ".join(f"{v:.5f}" for v in row))
print("r log 2 for r = 1/2:", 0.5 * math.log(2))

# (log n)^(1+eps) times the gap diverges along n = 2^k for any eps > 0 ...
rule = parse_scaling("powerlog:r=0.5")
for eps in (0.0, 0.1):
    seq = proposition_divergence(rule, eps, 10**6)
    print(f"eps={eps}: k=10 {seq[10]:.4f}  k=1e3 {seq[1000]:.4f}  k=1e6 {seq[-1]:.4f}")

# the implicit normaliser h with h^2 = n log h, far beyond float range for n
for n in (1e4, 1e12, 1e300):
    h = solve_h(n)
    print(f"n={n:.0e}  h={h:.6e}  h / sqrt(n log n / 2) = {h / math.sqrt(n * math.log(n) / 2):.6f}")
print(np.log(np.log(1e300)) / (2 * np.log(1e300)), "= predicted excess at 1e300")
