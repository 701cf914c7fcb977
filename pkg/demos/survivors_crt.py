"""
Sieve survivors and an exact periodic count
===========================================

Integers with no prime factor below ``z`` (or below ``m**delta``), their
pair and triple counts, and the count obtained from periodicity modulo
the primorial of ``z``.
"""
import numpy as np

from gaplab import SurvivorConfig, crt_pair_oracle, crt_triple_oracle, pair_count, triple_count
from gaplab.sieve import small_primes
from gaplab.survivors import survivor_count, survivors

# Two flavors: fixed z, and z = m**delta with delta = 1/d_inv
print(survivors(SurvivorConfig.fixed(7, 60)))
print(survivors(SurvivorConfig.variable(60, 2)))

# Density of z-rough numbers against the Mertens-type product prod (1 - 1/p)
x = 10**7
for z in (3, 7, 31, 101, 1009):
    cfg = SurvivorConfig.fixed(z, x)
    mertens = np.prod(1 - 1 / small_primes(z - 1).astype(float))
    print(f"z={z:>5d}  density {survivor_count(cfg) / x:.5f}  product {mertens:.5f}")

# Pair and triple counts agree exactly with the periodic count
for z in (3, 5, 7, 11):
    cfg = SurvivorConfig.fixed(z, 10**6)
    pairs = [(d, pair_count(cfg, d), crt_pair_oracle(10**6, z, d)) for d in (2, 4, 6, 30)]
    print(z, pairs)
    print("   triple (6, 12):", triple_count(cfg, 6, 12), crt_triple_oracle(10**6, z, 6, 12))

# With delta = 1/10 every prime survives, and so do m with spf(m)^10 >= m
cfg = SurvivorConfig.variable(10**7, 10)
print("delta=1/10 members up to 10^7:", survivor_count(cfg))
