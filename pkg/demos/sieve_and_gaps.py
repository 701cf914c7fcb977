"""
Primes and their successor gaps
===============================

Segmented sieving up to ten million, the gap records it produces and
how the gaps compare with the average spacing ``log p``.
"""
import math
import time

import numpy as np

from gaplab import prime_count, primes_in_range, spf_range
from gaplab.gapstats import gap_blocks

# pi(x) for a few powers of ten; the sieve works on odd numbers only
for e in range(3, 9):
    t0 = time.perf_counter()
    n = prime_count(10**e)
    print(f"pi(10^{e}) = {n:>9d}   ({time.perf_counter() - t0:.2f}s)")

# Gap records come in array blocks: each prime with its successor.
# The successor of the last prime below x lies past x.
p, q = next(gap_blocks(100))
print(list(zip(p.tolist(), (q - p).tolist()))[-5:])

# Normalized gaps (p' - p) / log p over primes up to 10^7
x = 10**7
norm = np.concatenate([(q - p) / np.log(p) for p, q in gap_blocks(x)])
print(f"{norm.size} gaps, mean normalized gap {norm.mean():.4f}")
hist, edges = np.histogram(norm, bins=np.arange(0, 4.25, 0.25))
for lo, c in zip(edges[:-1], hist):
    print(f"  [{lo:4.2f}, {lo + 0.25:4.2f})  {c / norm.size:7.4f}  {'#' * int(200 * c / norm.size)}")

# Exponential law for comparison: mass of [a, a + 0.25) is e^-a - e^-(a + 0.25)
print("exp model for first bin:", 1 - math.exp(-0.25))

# Smallest prime factors over a window, with primes mapping to themselves
table = spf_range(10**6, 10**6 + 12)
print([(m, table[m]) for m in range(10**6, 10**6 + 12)])
print(primes_in_range(10**6, 10**6 + 100))
