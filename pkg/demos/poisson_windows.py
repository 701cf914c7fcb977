"""
Primes in short windows and the gap distribution
================================================

Histogram of the number of primes in ``(n, n + h]`` with ``h = lambda log x``
against the Poisson law, and the fraction of gaps below ``lambda log p``
against ``1 - exp(-lambda)``.
"""
import math

from gaplab import gallagher_histogram, gap_cdf, window_prime_total
from gaplab.thresholds import ThresholdSpec

x = 10**7
hist = gallagher_histogram(x, 1.0, kmax=8)
pred = hist.poisson()
print(f"h = {hist.h:.3f}, mean count {hist.first_moment / x:.4f}")
for k, (c, p) in enumerate(zip(hist.counts, pred)):
    print(f"k={k}  P_k/x {c / x:.4f}  poisson {p / x:.4f}  ratio {c / p:.3f}")

# The windows hold fewer than Poisson-many zeros and too many ones: the counts
# are under-dispersed at this height
var = sum(k * k * c for k, c in enumerate(hist.counts)) / x - (hist.first_moment / x) ** 2
print(f"variance {var:.4f} vs mean {hist.first_moment / x:.4f}")
assert hist.first_moment == window_prime_total(x, hist.h)

# The picture changes slowly with x
for e in (5, 6, 7, 8):
    h = gallagher_histogram(10**e, 1.0, kmax=4)
    print(f"x=10^{e}  P_0/x = {h.counts[0] / 10**e:.4f}  (e^-1 = {math.exp(-1):.4f})")

# Gap CDF: fraction of p <= x with p' - p <= lambda log p
for lam in (0.25, 0.5, 1, 2):
    r = gap_cdf(x, ThresholdSpec.fixed(lam))
    print(f"lambda={lam:<5} empirical {r.empirical:.4f}  1 - e^-lambda {r.predicted:.4f}")
