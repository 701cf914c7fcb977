"""
Segmented sieve of Eratosthenes.

Primes are produced block by block from odd-only segments so that memory
stays bounded by the segment length rather than the range. Every consumer
in the package (gap records, interval histograms, tuple counts) is driven
by :func:`iter_prime_blocks` or the generic :func:`successor_blocks`.

Block boundaries never leak into results: the sequence of primes and of
successor records is identical for every admissible ``segment_len``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, NamedTuple

import numpy as np

from .errors import DomainError, ExtensionExhaustedError, RangeCeilingError

GLOBAL_CEILING = 10**11
DEFAULT_SEGMENT_LEN = 1 << 21
MIN_SEGMENT_LEN = 64
# successor lookahead is LOOKAHEAD_FACTOR * log x, doubled on failure
LOOKAHEAD_FACTOR = 2000


@dataclass(frozen=True)
class SegmentSpec:
    """A half-open range ``[lo, hi)`` sieved in blocks of ``segment_len`` integers."""

    lo: int
    hi: int
    segment_len: int = DEFAULT_SEGMENT_LEN

    def __post_init__(self):
        if self.lo >= self.hi:
            raise DomainError(f"empty range: lo={self.lo} >= hi={self.hi}")
        if self.lo < 0:
            raise DomainError(f"lo={self.lo} must be non-negative")
        if self.segment_len < MIN_SEGMENT_LEN:
            raise DomainError(
                f"segment_len={self.segment_len} is below the minimum {MIN_SEGMENT_LEN}"
            )

    def segments(self) -> Iterator[tuple[int, int]]:
        for a in range(self.lo, self.hi, self.segment_len):
            yield a, min(a + self.segment_len, self.hi)


class PrimeGapRecord(NamedTuple):
    p: int
    p_next: int
    gap: int


@lru_cache(maxsize=32)
def small_primes(limit: int) -> np.ndarray:
    """All primes ``<= limit`` from a plain (unsegmented) sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    out = np.flatnonzero(flags).astype(np.int64)
    out.flags.writeable = False
    return out


def _check_ceiling(hi: int, ceiling: int) -> None:
    if hi - 1 > ceiling:
        raise RangeCeilingError(f"range end {hi - 1} exceeds the ceiling {ceiling}")


def _segment_primes(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Primes in ``[lo, hi)``; ``base`` must hold every prime ``<= sqrt(hi - 1)``."""
    first = max(lo | 1, 3)
    head = [2] if lo <= 2 < hi else []
    if first >= hi:
        return np.array(head, dtype=np.int64)
    n_odd = (hi - first + 1) // 2
    mask = np.ones(n_odd, dtype=bool)
    odd = base[1:]
    odd = odd[odd * odd < hi]
    if odd.size:
        starts = np.maximum(odd * odd, (first + odd - 1) // odd * odd)
        starts += (starts % 2 == 0) * odd
        offsets = (starts - first) // 2
        for p, off in zip(odd.tolist(), offsets.tolist()):
            if off < n_odd:
                mask[off::p] = False
    primes = first + 2 * np.flatnonzero(mask).astype(np.int64)
    if head:
        primes = np.concatenate([np.array(head, dtype=np.int64), primes])
    return primes


def map_segments(
    fn: Callable[[int, int], np.ndarray],
    spec: SegmentSpec,
    threads: int = 1,
) -> Iterator[np.ndarray]:
    """Apply ``fn(a, b)`` to every segment of ``spec``, yielding in ascending order.

    With ``threads > 1`` segments are evaluated in bounded waves on a thread
    pool; the output order is always the segment order.
    """
    if threads <= 1:
        for a, b in spec.segments():
            yield fn(a, b)
        return
    wave = 2 * threads
    segs = list(spec.segments())
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for i in range(0, len(segs), wave):
            chunk = segs[i : i + wave]
            yield from pool.map(lambda ab: fn(*ab), chunk)


def iter_prime_blocks(
    lo: int,
    hi: int,
    segment_len: int = DEFAULT_SEGMENT_LEN,
    *,
    threads: int = 1,
    ceiling: int = GLOBAL_CEILING,
) -> Iterator[np.ndarray]:
    """Yield the primes of ``[lo, hi)`` as one ascending int64 array per segment."""
    spec = SegmentSpec(lo, hi, segment_len)
    _check_ceiling(hi, ceiling)
    base = small_primes(math.isqrt(hi - 1))
    yield from map_segments(lambda a, b: _segment_primes(a, b, base), spec, threads)


def primes_in_range(
    lo: int,
    hi: int,
    segment_len: int = DEFAULT_SEGMENT_LEN,
    *,
    threads: int = 1,
    ceiling: int = GLOBAL_CEILING,
) -> np.ndarray:
    """
    Primes in the half-open interval ``[lo, hi)``.

    Raises
    ------
    DomainError
        If ``lo >= hi``.
    RangeCeilingError
        If ``hi - 1`` exceeds ``ceiling``.
    """
    blocks = list(iter_prime_blocks(lo, hi, segment_len, threads=threads, ceiling=ceiling))
    return np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.int64)


def prime_count(x: int, segment_len: int = DEFAULT_SEGMENT_LEN, *, threads: int = 1) -> int:
    """pi(x), the number of primes ``<= x``."""
    if x < 2:
        return 0
    return sum(int(b.size) for b in iter_prime_blocks(2, x + 1, segment_len, threads=threads))


def prime_mask(lo: int, hi: int) -> np.ndarray:
    """Boolean array ``mask[i] = is_prime(lo + i)`` over ``[lo, hi)``."""
    mask = np.zeros(hi - lo, dtype=bool)
    if hi > 2:
        primes = primes_in_range(max(lo, 2), hi) if hi > max(lo, 2) else np.zeros(0, np.int64)
        mask[primes - lo] = True
    return mask


def lookahead(x: int) -> int:
    """Initial successor lookahead past ``x``."""
    return math.ceil(LOOKAHEAD_FACTOR * math.log(max(x, 2)))


def next_member(
    members: Callable[[int, int], np.ndarray],
    after: int,
    x: int,
    ceiling: int = GLOBAL_CEILING,
) -> int:
    """Least member greater than ``after``, searching windows that double in length."""
    width = lookahead(x)
    lo = after + 1
    while True:
        hi = lo + width
        if hi - 1 > ceiling:
            raise ExtensionExhaustedError(
                f"no successor of {after} found below the ceiling {ceiling}"
            )
        found = members(lo, hi)
        if found.size:
            return int(found[0])
        lo, width = hi, 2 * width


def successor_blocks(
    members: Callable[[int, int], np.ndarray],
    x: int,
    segment_len: int = DEFAULT_SEGMENT_LEN,
    *,
    start: int = 2,
    threads: int = 1,
    ceiling: int = GLOBAL_CEILING,
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """
    Pair every member ``m <= x`` of a set with its successor in the set.

    Parameters
    ----------
    members : callable
        ``members(a, b)`` returns the ascending members of ``[a, b)``.
    x : int
        Inclusive bound on the first element of each pair. The successor of
        the last member may exceed ``x``.

    Yields
    ------
    (m, m_next) : tuple of int64 arrays
        Consecutive pairs, in ascending order, one tuple per non-empty block.
    """
    if x < start:
        return
    _check_ceiling(x + 1, ceiling)
    carry = None
    for block in map_segments(members, SegmentSpec(start, x + 1, segment_len), threads):
        if not block.size:
            continue
        if carry is not None:
            block = np.concatenate([np.array([carry], dtype=np.int64), block])
        if block.size > 1:
            yield block[:-1], block[1:]
        carry = int(block[-1])
    if carry is not None:
        nxt = next_member(members, carry, x, ceiling)
        yield np.array([carry], dtype=np.int64), np.array([nxt], dtype=np.int64)


def prime_members() -> Callable[[int, int], np.ndarray]:
    """Membership callback for :func:`successor_blocks` that yields primes."""
    base = small_primes(1 << 10)

    def members(a: int, b: int) -> np.ndarray:
        nonlocal base
        need = math.isqrt(b - 1)
        if int(base[-1]) < need:
            base = small_primes(max(need, 2 * int(base[-1])))
        return _segment_primes(a, b, base)

    return members


def iter_gap_blocks(
    x: int,
    segment_len: int = DEFAULT_SEGMENT_LEN,
    *,
    threads: int = 1,
    ceiling: int = GLOBAL_CEILING,
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Array form of :func:`prime_gap_stream`: ``(p, p_next)`` blocks for ``p <= x``."""
    if x < 2:
        raise DomainError(f"x={x} must be at least 2")
    yield from successor_blocks(
        prime_members(), x, segment_len, threads=threads, ceiling=ceiling
    )


def prime_gap_stream(
    x: int, segment_len: int = DEFAULT_SEGMENT_LEN, *, threads: int = 1
) -> Iterator[PrimeGapRecord]:
    """One :class:`PrimeGapRecord` per prime ``p <= x``, including the successor of the last."""
    for p, q in iter_gap_blocks(x, segment_len, threads=threads):
        for a, b in zip(p.tolist(), q.tolist()):
            yield PrimeGapRecord(a, b, b - a)


@dataclass(frozen=True)
class SpfTable:
    """Smallest prime factors of ``base, base + 1, ..., base + len(entries) - 1``."""

    base: int
    entries: np.ndarray

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, m: int) -> int:
        if not self.base <= m < self.base + len(self.entries):
            raise IndexError(f"{m} outside [{self.base}, {self.base + len(self.entries)})")
        return int(self.entries[m - self.base])

    spf = __getitem__


def spf_range(lo: int, hi: int) -> SpfTable:
    """Smallest-prime-factor table over ``[lo, hi)``; primes map to themselves."""
    if not 2 <= lo < hi:
        raise DomainError(f"need 2 <= lo < hi, got lo={lo}, hi={hi}")
    entries = np.zeros(hi - lo, dtype=np.int64)
    for p in small_primes(math.isqrt(hi - 1)).tolist():
        start = max(p * p, -(-lo // p) * p)
        if start >= hi:
            continue
        view = entries[start - lo :: p]
        view[view == 0] = p
    unset = entries == 0
    entries[unset] = np.arange(lo, hi, dtype=np.int64)[unset]
    return SpfTable(lo, entries)
