"""Brute-force check of the inverted distribution at moderate n."""
from slowclt.montecarlo import McConfig, crosscheck
from slowclt.scaling import parse_scaling
from slowclt.summands import CubicTailFamily, PlainParetoFamily

cfg = McConfig(n=1000, m=100000, seed=1)
for fam, rule in ((CubicTailFamily(1.0), parse_scaling("natural")),
                  (PlainParetoFamily(1.0), parse_scaling("const", 1.0))):
    r = crosscheck(fam, rule, cfg)
    print(f"{fam.spec:18s} KS={r.ks:.5f}  band={r.half_width + r.grid_tol:.5f}  "
          f"passed={r.passed}  symmetric={r.symmetric}")

# a wrong normaliser is caught far outside the band
bad = crosscheck(CubicTailFamily(1.0), parse_scaling("natural"), cfg, a_scale=1.5)
print(f"a_n x 1.5: KS={bad.ks:.4f} passed={bad.passed} pipeline_bug={bad.pipeline_bug}")
