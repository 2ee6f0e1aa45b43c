"""Sums of cubic-tail summands approach the Gaussian only logarithmically.

Density A / (2|x|^3) in the tails has infinite variance, but the
truncated variance grows like A log x, so S_n / sqrt(n log n / 2)
still tends to a Gaussian of variance A.  The distance shrinks like
log log n / log n, which no simulation could reach: here phi(t/a_n)^n
is inverted exactly for n up to 1e12.
"""
import math

from slowclt import CubicTailFamily, compute_distribution, kolmogorov, parse_scaling, sup_density_distance
from slowclt.fourier import default_grid
from slowclt.harness import limit_law

fam = CubicTailFamily(1.0)
ns = [10.0**k for k in range(4, 13, 2)]
for spec in ("natural", "kk"):
    rule = parse_scaling(spec)
    law = limit_law(fam, rule)
    grid = default_grid(fam, rule, ns, law)
    print(f"\n{spec}: limit gamma={law.gamma:.6f}, x_max={grid.x_max:.1f}")
    print("      n        K_n      D_n   D_n log n")
    for n in ns:
        dist = compute_distribution(fam, rule, n, grid)
        k, d = kolmogorov(dist, law), sup_density_distance(dist, law)
        print(f"{n:8.0e}  {k.value:.3e}  {d.value:.3e}  {d.value * math.log(n):.4f}")

# with h^2 = n log h the product D_n log n settles; with sqrt(n log n / 2)
# it keeps growing like log log n
