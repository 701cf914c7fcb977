"""
Hardy-Littlewood singular series
================================

Euler products for admissible tuples, with a tail evaluated from prime
zeta values, and the averages over pair and triple offsets.
"""
import math

from gaplab import hl_compare, is_admissible, pair_sum, singular_series, triple_sum
from gaplab.singular import tail_log

# Twin constant: the product for {0, 2}
res = singular_series((0, 2))
print(res.to_json())

# The tail beyond P is applied in closed form; the bound shrinks fast with P
for P in (10**4, 10**5, 10**6):
    r = singular_series((0, 2), truncation_prime=P)
    print(f"P={P:>8d}  value={r.value:.16f}  rel bound={r.tail_bound:.2e}")

tail, err = tail_log(2, 10**4)
print(f"log tail for r=2 beyond 10^4: {tail:.3e} +- {err:.1e}")

# Admissibility only needs primes up to the tuple size
for H in [(0, 2, 4), (0, 2, 6), (0, 4, 6), (0, 2, 6, 8), (0, 2, 6, 8, 12)]:
    print(H, is_admissible(H), singular_series(H).value)

# Counts against the prediction S(H) x / (log x)^r
for H in [(0, 2), (0, 4), (0, 6), (0, 2, 6)]:
    c = hl_compare(10**7, H)
    print(f"{str(c.tuple):>8}: actual {c.actual:>7d}  predicted {c.predicted:10.1f}  ratio {c.ratio:.3f}")

# The average of S({0, d}) over d <= h tends to 1, with error about log(h) / (2h)
for h in (10**2, 10**3, 10**4, 10**5):
    dev = pair_sum(h) / h - 1
    print(f"h={h:>6d}  pair_sum/h - 1 = {dev:+.3e}   log(h)/(2h) = {math.log(h) / (2 * h):.3e}")

# Triple average over ordered distinct pairs (d1, d2), also tending to 1
for h in (100, 500, 2000):
    print(f"h={h:>5d}  triple_sum/h^2 = {triple_sum(h) / h**2:.5f}")
