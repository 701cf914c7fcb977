"""
Sieve survivors: integers with no small prime factor.

Two membership rules are supported:

* ``fixed_z``: ``m`` survives iff its smallest prime factor is ``>= z``.
* ``variable_delta`` with ``delta = 1/d_inv``: ``m`` survives iff
  ``spf(m)**d_inv >= m``, i.e. no prime ``p`` with ``p**d_inv < m``
  divides ``m``. Equality (``m = p**d_inv``) counts as surviving.

``m = 1`` is never a survivor. Membership depends only on ``m`` and the
rule, never on the range bound ``x``; counts over ``m <= x`` may look at
``m + d > x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import DomainError
from .sieve import DEFAULT_SEGMENT_LEN, SegmentSpec, map_segments, small_primes, successor_blocks

# 1/delta = 10 is the standard worked choice and exceeds the sifting limit
# of the two-dimensional sieve; the limit itself is not computed.
DEFAULT_D_INV = 10
CRT_MODULUS_MAX = 10**9


@dataclass(frozen=True)
class SurvivorConfig:
    """A survivor set together with the range bound ``x``."""

    mode: str
    x: int
    z: int | None = None
    d_inv: int | None = None

    def __post_init__(self):
        if self.mode == "fixed_z":
            if self.z is None or self.z < 3:
                raise DomainError(f"fixed_z survivors need z >= 3, got z={self.z}")
        elif self.mode == "variable_delta":
            if self.d_inv is None or self.d_inv < 2:
                raise DomainError(f"variable_delta survivors need d_inv >= 2, got {self.d_inv}")
        else:
            raise DomainError(f"unknown survivor mode {self.mode!r}")
        if self.x < 2:
            raise DomainError(f"x={self.x} must be at least 2")

    @classmethod
    def fixed(cls, z: int, x: int) -> SurvivorConfig:
        return cls("fixed_z", int(x), z=int(z))

    @classmethod
    def variable(cls, x: int, d_inv: int = DEFAULT_D_INV) -> SurvivorConfig:
        return cls("variable_delta", int(x), d_inv=int(d_inv))

    @classmethod
    def parse(cls, x: int, z: int | None = None, delta: str | None = None) -> SurvivorConfig:
        """Build from the CLI options ``--z N`` or ``--delta 1/N``."""
        if (z is None) == (delta is None):
            raise DomainError("survivors need exactly one of --z or --delta")
        if z is not None:
            return cls.fixed(z, x)
        try:
            frac = Fraction(delta)
        except (ValueError, ZeroDivisionError):
            frac = None
        if frac is None or frac <= 0 or frac.numerator != 1:
            raise DomainError(f"--delta must be the reciprocal of an integer, got {delta!r}")
        return cls.variable(x, frac.denominator)

    def with_x(self, x: int) -> SurvivorConfig:
        return replace(self, x=int(x))

    @property
    def label(self) -> str:
        return f"z={self.z}" if self.mode == "fixed_z" else f"delta=1/{self.d_inv}"

    def mask(self, a: int, b: int) -> np.ndarray:
        """Boolean membership array over ``[a, b)``."""
        return survivor_mask(a, b, self)

    def members(self, a: int, b: int) -> np.ndarray:
        return a + np.flatnonzero(survivor_mask(a, b, self)).astype(np.int64)


class SurvivorGapRecord(NamedTuple):
    m: int
    m_next: int
    gap: int


def _strike_primes(b: int, cfg: SurvivorConfig) -> np.ndarray:
    if cfg.mode == "fixed_z":
        return small_primes(cfg.z - 1)
    # primes with p**d_inv < b
    root = int(round((b - 1) ** (1.0 / cfg.d_inv))) + 2
    ps = small_primes(root)
    return ps[[p**cfg.d_inv < b for p in ps.tolist()]] if ps.size else ps


def survivor_mask(a: int, b: int, cfg: SurvivorConfig) -> np.ndarray:
    """Membership of every integer in ``[a, b)``, ``a >= 0``."""
    mask = np.ones(b - a, dtype=bool)
    mask[: max(0, min(2, b) - a)] = False
    for p in _strike_primes(b, cfg).tolist():
        lowest = p if cfg.mode == "fixed_z" else p**cfg.d_inv + 1
        start = max(lowest, -(-a // p) * p)
        start = -(-start // p) * p
        if start < b:
            mask[start - a :: p] = False
    return mask


def _spf_trial(m: int) -> int:
    if m % 2 == 0:
        return 2
    for p in range(3, math.isqrt(m) + 1, 2):
        if m % p == 0:
            return p
    return m


def is_survivor(m: int, cfg: SurvivorConfig) -> bool:
    """Exact scalar membership test (integer arithmetic only)."""
    if m < 2:
        raise DomainError(f"m={m} must be at least 2")
    spf = _spf_trial(m)
    if cfg.mode == "fixed_z":
        return spf >= cfg.z
    return spf**cfg.d_inv >= m


def iter_survivor_blocks(
    cfg: SurvivorConfig, segment_len: int = DEFAULT_SEGMENT_LEN, *, threads: int = 1
) -> Iterator[np.ndarray]:
    yield from map_segments(cfg.members, SegmentSpec(2, cfg.x + 1, segment_len), threads)


def survivors(cfg: SurvivorConfig, segment_len: int = DEFAULT_SEGMENT_LEN) -> np.ndarray:
    """All members ``m <= x`` as an ascending array."""
    blocks = list(iter_survivor_blocks(cfg, segment_len))
    return np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.int64)


def survivor_stream(cfg: SurvivorConfig, segment_len: int = DEFAULT_SEGMENT_LEN) -> Iterator[int]:
    for block in iter_survivor_blocks(cfg, segment_len):
        yield from block.tolist()


def survivor_count(cfg: SurvivorConfig, segment_len: int = DEFAULT_SEGMENT_LEN) -> int:
    return sum(int(b.size) for b in iter_survivor_blocks(cfg, segment_len))


def survivor_gap_blocks(
    cfg: SurvivorConfig, segment_len: int = DEFAULT_SEGMENT_LEN, *, threads: int = 1
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """``(m, m_next)`` array blocks for every member ``m <= x``."""
    yield from successor_blocks(cfg.members, cfg.x, segment_len, threads=threads)


def survivor_gap_stream(
    cfg: SurvivorConfig, segment_len: int = DEFAULT_SEGMENT_LEN
) -> Iterator[SurvivorGapRecord]:
    for m, n in survivor_gap_blocks(cfg, segment_len):
        for a, b in zip(m.tolist(), n.tolist()):
            yield SurvivorGapRecord(a, b, b - a)


def tuple_counts(
    cfg: SurvivorConfig,
    patterns: Sequence[Sequence[int]],
    segment_len: int = DEFAULT_SEGMENT_LEN,
) -> list[int]:
    """
    For each offset pattern ``(d_1, ..., d_j)`` count ``m <= x`` with ``m`` and
    every ``m + d_i`` in the set. One membership pass serves all patterns.
    """
    reach = max((max(p) for p in patterns if len(p)), default=0)
    counts = [0] * len(patterns)
    for a in range(2, cfg.x + 1, segment_len):
        b = min(a + segment_len, cfg.x + 1)
        n = b - a
        mask = survivor_mask(a, b + reach, cfg)
        base = mask[:n]
        for i, pat in enumerate(patterns):
            ok = base.copy()
            for d in pat:
                ok &= mask[d : d + n]
            counts[i] += int(ok.sum())
    return counts


def pair_count(cfg: SurvivorConfig, d: int, segment_len: int = DEFAULT_SEGMENT_LEN) -> int:
    """``#{m <= x : m and m + d both survive}``."""
    if d < 1:
        raise DomainError(f"d={d} must be at least 1")
    return tuple_counts(cfg, [(d,)], segment_len)[0]


def triple_count(
    cfg: SurvivorConfig, d1: int, d2: int, segment_len: int = DEFAULT_SEGMENT_LEN
) -> int:
    """``#{m <= x : m, m + d1, m + d2 all survive}`` for ``1 <= d1 < d2``."""
    if not 1 <= d1 < d2:
        raise DomainError(f"need 1 <= d1 < d2, got d1={d1}, d2={d2}")
    return tuple_counts(cfg, [(d1, d2)], segment_len)[0]


def _crt_count(x: int, z: int, offsets: Sequence[int]) -> int:
    primes = small_primes(z - 1).tolist()
    W = math.prod(primes)
    if W > CRT_MODULUS_MAX:
        raise DomainError(f"primorial modulus {W} for z={z} exceeds {CRT_MODULUS_MAX}")
    shifts = [0, *offsets]
    # residues a mod W with a + s prime to W for every shift, counted per prime by CRT
    per_period = math.prod(p - len({-s % p for s in shifts}) for p in primes)
    q, rem = divmod(x, W)
    count = q * per_period
    if rem:
        m = np.arange(q * W + 1, x + 1, dtype=np.int64)
        ok = np.ones(m.size, dtype=bool)
        for s in shifts:
            ok &= np.gcd(m + s, W) == 1
        count += int(ok.sum())
    if all(math.gcd(1 + s, W) == 1 for s in shifts):
        count -= 1  # m = 1 is not a survivor
    return count


def crt_pair_oracle(x: int, z: int, d: int) -> int:
    """Exact pair count for ``fixed_z`` survivors by periodicity modulo the primorial of ``z``."""
    if d < 1:
        raise DomainError(f"d={d} must be at least 1")
    return _crt_count(x, z, [d])


def crt_triple_oracle(x: int, z: int, d1: int, d2: int) -> int:
    if not 1 <= d1 < d2:
        raise DomainError(f"need 1 <= d1 < d2, got d1={d1}, d2={d2}")
    return _crt_count(x, z, [d1, d2])
