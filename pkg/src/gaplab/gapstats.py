"""
Gap statistics over primes and sieve survivors.

Every statistic here is a single ordered pass over ``(element, successor)``
blocks. An element ``p`` *qualifies* for a threshold family when its
successor gap satisfies ``p_next - p <= lam(p) * log p``; elements below the
family's domain floor are skipped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

import numpy as np

from .errors import ConcurrencyContractError, DomainError
from .sieve import DEFAULT_SEGMENT_LEN, iter_prime_blocks, prime_members, successor_blocks
from .summation import CompensatedSum
from .survivors import SurvivorConfig
from .thresholds import AdaptiveState, ThresholdSpec, domain_floor

Population = Union[str, SurvivorConfig]
DEFAULT_KMAX = 16


def _members(population: Population):
    if isinstance(population, SurvivorConfig):
        return population.members
    if population == "primes":
        return prime_members()
    raise DomainError(f"unknown population {population!r}; use 'primes' or a SurvivorConfig")


def population_label(population: Population) -> str:
    if isinstance(population, SurvivorConfig):
        return f"survivors({population.label})"
    return "primes"


def gap_blocks(
    x: int,
    population: Population = "primes",
    segment_len: int = DEFAULT_SEGMENT_LEN,
    *,
    lo: int = 2,
    threads: int = 1,
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """``(element, successor)`` blocks for every element ``lo <= e <= x``."""
    if x < 2:
        raise DomainError(f"x={x} must be at least 2")
    yield from successor_blocks(_members(population), x, segment_len, start=lo, threads=threads)


class Checkpoint(NamedTuple):
    x: int
    sum: float
    count: int
    k: int | None


@dataclass
class ReciprocalSumAccumulator:
    """Compensated sum of ``1/e`` over qualifying elements, with checkpoint snapshots."""

    total: CompensatedSum = field(default_factory=CompensatedSum)
    count: int = 0
    checkpoint_log: list[Checkpoint] = field(default_factory=list)
    adaptive: AdaptiveState | None = None

    @property
    def sum(self) -> float:
        return self.total.value

    def add(self, elements: np.ndarray) -> None:
        if elements.size:
            self.total.add(1.0 / elements.astype(np.float64))
            self.count += int(elements.size)

    def checkpoint(self, x: int, k: int | None = None) -> None:
        self.checkpoint_log.append(Checkpoint(int(x), self.sum, self.count, k))

    def merge(self, other: ReciprocalSumAccumulator) -> ReciprocalSumAccumulator:
        """Combine with the accumulator of the range immediately above this one."""
        if self.adaptive is not None or other.adaptive is not None:
            raise ConcurrencyContractError("adaptive sweeps are sequential and cannot be merged")
        out = ReciprocalSumAccumulator(self.total.copy().merge(other.total), self.count + other.count)
        out.checkpoint_log = list(self.checkpoint_log) + [
            Checkpoint(c.x, (self.total.copy().add([c.sum])).value, c.count + self.count, c.k)
            for c in other.checkpoint_log
        ]
        return out


def _split(p: np.ndarray, q: np.ndarray, checkpoints: Sequence[int], pos: int):
    """Cut a block at checkpoint boundaries; yields (p, q, checkpoint-or-None), new pos."""
    start = 0
    while pos < len(checkpoints) and p.size and checkpoints[pos] < p[-1]:
        cut = int(np.searchsorted(p, checkpoints[pos], side="right"))
        yield p[start:cut], q[start:cut], checkpoints[pos]
        start = cut
        pos += 1
    yield p[start:], q[start:], None


def _qualifying(p: np.ndarray, q: np.ndarray, threshold: ThresholdSpec, k: int | None = None):
    return (q - p) <= threshold.y_array(p, k)


def _adaptive_feed(p, q, threshold: ThresholdSpec, state: AdaptiveState, acc) -> None:
    i = 0
    while i < p.size:
        k = state.current_k
        sp, sq = p[i:], q[i:]
        qual = _qualifying(sp, sq, threshold, k)
        rec = np.where(qual, 1.0 / sp.astype(np.float64), 0.0)
        before = state.running_sum + np.cumsum(rec) - rec
        eligible = (before > 1) & (sp >= domain_floor(k + 2))
        hits = np.flatnonzero(eligible)
        j = int(hits[0]) if hits.size else sp.size
        acc.add(sp[:j][qual[:j]])
        state.running_sum = acc.sum
        if j == sp.size:
            return
        if not state.advance(int(sp[j])):
            # cumulative estimate crossed 1 but the compensated sum did not
            if qual[j]:
                acc.add(sp[j : j + 1])
                state.running_sum = acc.sum
            j += 1
        i += j


def feed_adaptive(
    elements: np.ndarray,
    successors: np.ndarray,
    threshold: ThresholdSpec,
    state: AdaptiveState,
    acc: ReciprocalSumAccumulator | None = None,
) -> ReciprocalSumAccumulator:
    """Run the adaptive rule over an arbitrary ascending ``(element, successor)`` stream."""
    acc = acc if acc is not None else ReciprocalSumAccumulator(adaptive=state)
    p = np.asarray(elements, dtype=np.int64)
    q = np.asarray(successors, dtype=np.int64)
    keep = p >= threshold.domain_floor
    _adaptive_feed(p[keep], q[keep], threshold, state, acc)
    return acc


def _sweep(
    x: int,
    threshold: ThresholdSpec,
    population: Population,
    checkpoints: Iterable[int],
    segment_len: int,
    threads: int,
    lo: int = 2,
) -> tuple[ReciprocalSumAccumulator, int]:
    adaptive = threshold.family == "adaptive"
    if adaptive and threads > 1:
        raise ConcurrencyContractError(
            f"threshold {threshold} is sequential by contract; run it with threads=1"
        )
    cps = sorted({int(c) for c in checkpoints if lo <= c < x})
    acc = ReciprocalSumAccumulator()
    if adaptive:
        acc.adaptive = threshold.new_state()
    floor = threshold.domain_floor
    total = 0
    pos = 0
    for p, q in gap_blocks(x, population, segment_len, lo=lo, threads=threads):
        total += int(p.size)
        pieces = list(_split(p, q, cps, pos))
        pos += sum(1 for piece in pieces if piece[2] is not None)
        for sp, sq, cp in pieces:
            keep = sp >= floor
            sp, sq = sp[keep], sq[keep]
            if adaptive:
                _adaptive_feed(sp, sq, threshold, acc.adaptive, acc)
            elif sp.size:
                acc.add(sp[_qualifying(sp, sq, threshold)])
            if cp is not None:
                acc.checkpoint(cp, _current_k(threshold, acc))
    while pos < len(cps):
        acc.checkpoint(cps[pos], _current_k(threshold, acc))
        pos += 1
    acc.checkpoint(x, _current_k(threshold, acc))
    return acc, total


def _current_k(threshold: ThresholdSpec, acc: ReciprocalSumAccumulator) -> int | None:
    return acc.adaptive.current_k if acc.adaptive is not None else threshold.k


def reciprocal_sum(
    x: int,
    threshold: ThresholdSpec,
    population: Population = "primes",
    checkpoints: Iterable[int] = (),
    segment_len: int = DEFAULT_SEGMENT_LEN,
    *,
    threads: int = 1,
    lo: int = 2,
) -> ReciprocalSumAccumulator:
    """
    Sum of ``1/p`` over elements ``lo <= p <= x`` whose successor gap is at most ``y(p)``.

    Parameters
    ----------
    x : int
        Inclusive upper bound on elements; successors may lie beyond it.
    threshold : ThresholdSpec
    population : ``"primes"`` or SurvivorConfig
        The ``x`` stored in a SurvivorConfig is ignored in favour of ``x``.
    checkpoints : iterable of int
        Bounds ``< x`` at which to snapshot ``(sum, count)``; ``x`` itself is
        always the last entry of ``checkpoint_log``.
    threads : int
        Worker threads for sieving. Must be 1 for the adaptive family.

    Returns
    -------
    ReciprocalSumAccumulator
        ``adaptive`` holds the final state (with switch points) for the
        adaptive family.
    """
    return _sweep(x, threshold, population, checkpoints, segment_len, threads, lo)[0]


@dataclass(frozen=True)
class GapCdfReport:
    x: int
    threshold: ThresholdSpec
    population: str
    qualifying: int
    total: int
    empirical: float
    predicted: float
    lambda_at_x: float

    @property
    def ratio(self) -> float:
        return self.empirical / self.predicted


def gap_cdf(
    x: int,
    threshold: ThresholdSpec,
    population: Population = "primes",
    segment_len: int = DEFAULT_SEGMENT_LEN,
    *,
    threads: int = 1,
) -> GapCdfReport:
    """
    Fraction of elements ``p <= x`` with ``(p_next - p)/log p <= lam(p)``,
    next to ``1 - exp(-lam(x))``.

    ``total`` counts every element ``<= x`` (pi(x) for primes), including
    those below the family's domain floor, which never qualify.
    """
    acc, total = _sweep(x, threshold, population, (), segment_len, threads)
    if acc.adaptive is not None:
        lam_x = ThresholdSpec.divergent(acc.adaptive.current_k).lam(x)
    else:
        lam_x = threshold.lam(x)
    return GapCdfReport(
        x,
        threshold,
        population_label(population),
        acc.count,
        total,
        acc.count / total if total else 0.0,
        -math.expm1(-lam_x),
        lam_x,
    )


@dataclass(frozen=True)
class IntervalHistogram:
    """``counts[k]`` = number of ``1 <= n <= x`` whose window ``(n, n+h]`` holds exactly k primes."""

    x: int
    h: float
    lambda0: float
    counts: np.ndarray
    overflow: int
    overflow_moment: int

    @property
    def kmax(self) -> int:
        return len(self.counts) - 1

    @property
    def first_moment(self) -> int:
        return int(np.dot(np.arange(self.kmax + 1), self.counts)) + self.overflow_moment

    def poisson(self) -> np.ndarray:
        """``x * exp(-lam) * lam**k / k!`` for ``k = 0..kmax``."""
        k = np.arange(self.kmax + 1)
        lam = self.lambda0
        logs = -lam + k * math.log(lam) - np.array([math.lgamma(i + 1) for i in k])
        return self.x * np.exp(logs)


def gallagher_histogram(
    x: int,
    lambda0: float | None = None,
    kmax: int = DEFAULT_KMAX,
    *,
    h: float | None = None,
    segment_len: int = DEFAULT_SEGMENT_LEN,
) -> IntervalHistogram:
    """
    Histogram of prime counts in the windows ``(n, n + h]``, ``1 <= n <= x``.

    Give either ``lambda0`` (then ``h = lambda0 * log x``) or ``h`` (then
    ``lambda0 = h / log x``). A prime ``q`` is in the window iff
    ``n < q <= n + floor(h)``.
    """
    if x < 10:
        raise DomainError(f"x={x} must be at least 10")
    if (lambda0 is None) == (h is None):
        raise DomainError("give exactly one of lambda0 or h")
    if h is None:
        if not lambda0 > 0:
            raise DomainError(f"lambda0={lambda0} must be positive")
        h = lambda0 * math.log(x)
    else:
        if not h > 0:
            raise DomainError(f"h={h} must be positive")
        lambda0 = h / math.log(x)
    if kmax < 0:
        raise DomainError(f"kmax={kmax} must be non-negative")
    H = math.floor(h)
    counts = np.zeros(kmax + 1, dtype=np.int64)
    overflow = overflow_moment = 0
    for a in range(1, x + 1, segment_len):
        b = min(a + segment_len, x + 1)
        if H == 0:
            counts[0] += b - a
            continue
        n = np.arange(a, b, dtype=np.int64)
        P = np.concatenate(list(iter_prime_blocks(a + 1, b + H)))
        k = np.searchsorted(P, n + H, side="right") - np.searchsorted(P, n, side="right")
        big = k > kmax
        counts += np.bincount(k[~big], minlength=kmax + 1)
        overflow += int(big.sum())
        overflow_moment += int(k[big].sum())
    return IntervalHistogram(x, float(h), float(lambda0), counts, overflow, overflow_moment)


def window_prime_total(x: int, h: float) -> int:
    """
    ``sum_{n=1..x} (pi(n + h) - pi(n))`` counted prime by prime: each prime ``q``
    lies in the windows with ``q - floor(h) <= n <= q - 1``.
    """
    H = math.floor(h)
    if H == 0:
        return 0
    total = 0
    for P in iter_prime_blocks(2, x + H + 1):
        hi = np.minimum(x, P - 1)
        lo = np.maximum(1, P - H)
        total += int(np.clip(hi - lo + 1, 0, None).sum())
    return total


def dyadic_partition(x0: int, x: int) -> list[tuple[int, int]]:
    """Intervals ``(M, 2M]`` anchored at ``x0``, the last cut at ``x``; returned as ``(M, upper)``."""
    if not 2 <= x0 < x:
        raise DomainError(f"need 2 <= x0 < x, got x0={x0}, x={x}")
    out = []
    M = x0
    while M < x:
        out.append((M, min(2 * M, x)))
        M *= 2
    return out


@dataclass(frozen=True)
class DyadicRow:
    M: int
    upper: int
    population: int
    qualifying_frozen: int
    qualifying_exact: int
    comparator: float

    @property
    def ratio(self) -> float | None:
        return self.qualifying_frozen / self.comparator if self.comparator else None


@dataclass(frozen=True)
class DyadicReport:
    x: int
    threshold: ThresholdSpec
    population: str
    rows: list[DyadicRow]

    @property
    def aggregate(self) -> DyadicRow:
        return DyadicRow(
            self.rows[0].M if self.rows else self.x,
            self.x,
            sum(r.population for r in self.rows),
            sum(r.qualifying_frozen for r in self.rows),
            sum(r.qualifying_exact for r in self.rows),
            math.fsum(r.comparator for r in self.rows),
        )


def survivor_gap_report(
    x: int,
    population: Population,
    threshold: ThresholdSpec,
    x0: int | None = None,
    segment_len: int = DEFAULT_SEGMENT_LEN,
) -> DyadicReport:
    """
    Per dyadic interval ``(M, 2M]``: members, members with gap ``<= y(M)``
    (threshold frozen at the left end), members with gap ``<= y(m)``, and
    ``(1 - exp(-lam(M))) * population``.
    """
    if threshold.family == "adaptive":
        raise DomainError("dyadic reports need a state-free threshold family")
    x0 = max(2, threshold.domain_floor) if x0 is None else x0
    if x0 < threshold.domain_floor:
        raise DomainError(f"x0={x0} is below the domain floor {threshold.domain_floor}")
    parts = dyadic_partition(x0, x)
    uppers = np.array([u for _, u in parts], dtype=np.int64)
    y_frozen = np.array([threshold.y(M) for M, _ in parts])
    pop = np.zeros(len(parts), dtype=np.int64)
    frozen = np.zeros(len(parts), dtype=np.int64)
    exact = np.zeros(len(parts), dtype=np.int64)
    for p, q in gap_blocks(x, population, segment_len, lo=x0 + 1):
        idx = np.searchsorted(uppers, p, side="left")
        gap = q - p
        n = len(parts)
        pop += np.bincount(idx, minlength=n)
        frozen += np.bincount(idx[gap <= y_frozen[idx]], minlength=n)
        exact += np.bincount(idx[gap <= threshold.y_array(p)], minlength=n)
    rows = [
        DyadicRow(
            M, u, int(pop[i]), int(frozen[i]), int(exact[i]),
            -math.expm1(-threshold.lam(M)) * int(pop[i]),
        )
        for i, (M, u) in enumerate(parts)
    ]
    return DyadicReport(x, threshold, population_label(population), rows)
