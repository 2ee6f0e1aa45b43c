"""Symmetric stable laws: density, distribution function and sampler."""
import math

import numpy as np
from scipy import stats

from slowclt import StableLaw, stable_sample

# psi(t) = exp(-(gamma |t|)^alpha); alpha = 2 is a Gaussian of variance 2 gamma^2
# and alpha = 1 a Cauchy law of scale gamma
x = np.linspace(-4, 4, 9)
gauss, cauchy = StableLaw(2.0, 1.0), StableLaw(1.0, 1.0)
print("max |gauss - norm|   ", np.max(np.abs(gauss.pdf(x) - stats.norm(scale=math.sqrt(2)).pdf(x))))
print("max |cauchy - cauchy|", np.max(np.abs(cauchy.pdf(x) - stats.cauchy.pdf(x))))

# in between there is no closed form, but the value at 0 is Gamma(1 + 1/alpha) / pi
for alpha in (0.7, 1.2, 1.5, 1.9):
    law = StableLaw(alpha)
    print(f"alpha={alpha}: rho(0)={law.pdf(0.0):.12f}  rho(1e-9)={law.pdf(1e-9):.12f}  "
          f"P(X>10)={1 - law.cdf(10.0):.3e}")

# heavier tails: P(X > x) ~ Gamma(alpha) sin(pi alpha / 2) / pi x^-alpha
law = StableLaw(1.5)
for xx in (10.0, 100.0, 1000.0):
    lead = math.gamma(1.5) * math.sin(0.75 * math.pi) / math.pi * xx**-1.5
    print(f"x={xx:6.0f}  tail={law.tail_prob(xx) / 2:.6e}  leading term={lead:.6e}")

# Chambers-Mallows-Stuck draws against the cdf
draws = np.sort(stable_sample(law, seed=0, count=50000))
print("KS of 5e4 draws:", stats.kstest(draws, law.cdf).statistic)
