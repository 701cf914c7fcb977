"""
Hardy-Littlewood singular series.

For an offset tuple ``H = (h_1, ..., h_r)`` the singular series is the
Euler product over all primes of ``(1 - nu(p)/p) * (1 - 1/p)**-r`` where
``nu(p)`` counts residues mod ``p`` hit by the offsets. Once ``p`` exceeds
the largest pairwise difference every factor has ``nu(p) = r``, so the
product splits into an exact finite part and a uniform tail. The tail is
evaluated from prime zeta tails ``T_m(P) = sum_{p>P} p**-m``:

    sum_{p>P} log(1 - r/p) - r*log(1 - 1/p) = -sum_{m>=2} (r**m - r)/m * T_m(P)

truncated at ``m = TAIL_TERMS`` with an explicit remainder bound, so the
reported ``tail_bound`` is a bound on the relative error of ``value``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Iterable

import mpmath
import numpy as np

from .errors import DomainError, TargetUnreachableError
from .sieve import DEFAULT_SEGMENT_LEN, prime_mask, primes_in_range, small_primes

TRUNCATION_LADDER = (10**4, 10**5, 10**6, 10**7)
TAIL_TERMS = 8
_EPS = 2.0**-52


@dataclass(frozen=True)
class OffsetTuple:
    """Sorted distinct non-negative offsets ``h_1 < ... < h_r``."""

    offsets: tuple[int, ...]

    def __post_init__(self):
        offs = tuple(int(h) for h in self.offsets)
        if not offs:
            raise DomainError("an offset tuple needs at least one offset")
        if any(h < 0 for h in offs):
            raise DomainError(f"offsets must be non-negative: {offs}")
        if len(set(offs)) != len(offs):
            raise DomainError(f"offsets must be distinct: {offs}")
        object.__setattr__(self, "offsets", tuple(sorted(offs)))

    @classmethod
    def parse(cls, text: str) -> OffsetTuple:
        """Parse the comma-separated form ``0,2,6``."""
        try:
            return cls(tuple(int(s) for s in text.split(",")))
        except ValueError:
            raise DomainError(f"bad tuple {text!r}; expected e.g. 0,2,6") from None

    @classmethod
    def coerce(cls, H: OffsetTuple | Iterable[int] | str) -> OffsetTuple:
        if isinstance(H, OffsetTuple):
            return H
        if isinstance(H, str):
            return cls.parse(H)
        return cls(tuple(H))

    @property
    def r(self) -> int:
        return len(self.offsets)

    @property
    def max_diff(self) -> int:
        return self.offsets[-1] - self.offsets[0]

    def shifted(self, c: int) -> OffsetTuple:
        return OffsetTuple(tuple(h + c for h in self.offsets))

    def __str__(self) -> str:
        return ",".join(map(str, self.offsets))


@dataclass(frozen=True)
class SingularSeriesResult:
    tuple: OffsetTuple
    value: float
    truncation_prime: int
    tail_bound: float
    admissible: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tuple"] = list(self.tuple.offsets)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def nu(H, p: int) -> int:
    """Number of residue classes mod ``p`` occupied by the offsets."""
    H = OffsetTuple.coerce(H)
    return len({h % p for h in H.offsets})


def _nu_many(H: OffsetTuple, primes: np.ndarray) -> np.ndarray:
    res = np.sort(np.array(H.offsets, dtype=np.int64)[:, None] % primes[None, :], axis=0)
    return 1 + (np.diff(res, axis=0) != 0).sum(axis=0)


def is_admissible(H) -> bool:
    """True iff ``nu(H, p) < p`` for every prime; only ``p <= r`` can fail."""
    H = OffsetTuple.coerce(H)
    return all(nu(H, p) < p for p in small_primes(H.r).tolist())


@lru_cache(maxsize=8)
def _primes_upto(P: int) -> np.ndarray:
    return primes_in_range(2, P + 1)


@lru_cache(maxsize=8)
def _prime_zeta_tails(P: int) -> tuple[tuple[float, float], ...]:
    """``(T_m(P), error bound)`` for ``m = 2..TAIL_TERMS``."""
    pf = _primes_upto(P).astype(np.float64)
    out = []
    with mpmath.workdps(30):
        for m in range(2, TAIL_TERMS + 1):
            partial = math.fsum((pf**-m).tolist())
            tail = float(mpmath.primezeta(m) - mpmath.mpf(partial))
            # fsum rounds once; the powers carry one rounding each
            err = _EPS * partial * (m + 2) + _EPS * abs(tail)
            out.append((tail, err))
    return tuple(out)


def tail_log(r: int, P: int) -> tuple[float, float]:
    """
    Log of the uniform tail ``prod_{p>P} (1 - r/p)(1 - 1/p)**-r`` and an error bound.

    Requires ``P >= 2r``. The bound covers the dropped terms ``m > TAIL_TERMS``
    (via ``T_m(P) <= P**(1-m)/(m-1)``) and rounding in the prime zeta tails.
    """
    if P < 2 * r:
        raise DomainError(f"truncation point P={P} must be at least 2r={2 * r}")
    value = 0.0
    bound = 0.0
    for m, (tail, err) in enumerate(_prime_zeta_tails(P), start=2):
        c = (r**m - r) / m
        value -= c * tail
        bound += c * err
    M = TAIL_TERMS
    q = r / P
    bound += P * q ** (M + 1) / ((M + 1) * M) / (1 - q)
    bound += _EPS * abs(value)
    return value, bound


def _log_terms(H: OffsetTuple, P: int) -> np.ndarray:
    primes = _primes_upto(P)
    pf = primes.astype(np.float64)
    nus = np.full(primes.shape, float(H.r))
    small = primes <= H.max_diff
    if small.any():
        nus[small] = _nu_many(H, primes[small])
    return np.log1p(-nus / pf) - H.r * np.log1p(-1.0 / pf)


def singular_series(
    H,
    rel_err_target: float = 1e-9,
    truncation_prime: int | None = None,
) -> SingularSeriesResult:
    """
    Evaluate the singular series of ``H``.

    Parameters
    ----------
    H : OffsetTuple, sequence of int, or str
    rel_err_target : float
        Required bound on the relative error, in ``(0, 0.1]``.
    truncation_prime : int, optional
        Force this truncation point instead of searching
        ``TRUNCATION_LADDER`` for the first one meeting the target.

    Returns
    -------
    SingularSeriesResult
        For an inadmissible tuple, ``value`` is exactly 0 and
        ``truncation_prime`` is the least prime whose residues are all hit.

    Raises
    ------
    TargetUnreachableError
        If no truncation point up to ``10**7`` meets ``rel_err_target``.
    """
    H = OffsetTuple.coerce(H)
    if not 0 < rel_err_target <= 0.1:
        raise DomainError(f"rel_err_target={rel_err_target} must lie in (0, 0.1]")
    if not is_admissible(H):
        killer = next(p for p in small_primes(H.r).tolist() if nu(H, p) == p)
        return SingularSeriesResult(H, 0.0, killer, 0.0, False)
    if truncation_prime is not None:
        if truncation_prime < max(H.max_diff, 2 * H.r):
            raise DomainError(
                f"truncation_prime={truncation_prime} must be at least "
                f"max(max pairwise difference, 2r) = {max(H.max_diff, 2 * H.r)}"
            )
        ladder = (truncation_prime,)
    else:
        ladder = tuple(P for P in TRUNCATION_LADDER if P >= max(H.max_diff, 2 * H.r))
    best = None
    for P in ladder:
        terms = _log_terms(H, P)
        finite = math.fsum(terms.tolist())
        tail, tail_err = tail_log(H.r, P)
        log_err = tail_err + 4 * _EPS * (math.fsum(np.abs(terms).tolist()) + abs(tail))
        rel = math.expm1(log_err) + 4 * _EPS
        best = SingularSeriesResult(H, math.exp(finite + tail), P, rel, True)
        if rel <= rel_err_target or truncation_prime is not None:
            return best
    raise TargetUnreachableError(
        f"relative error {rel_err_target} unreachable for {H}"
        + (f"; best bound {best.tail_bound:.3g} at P={best.truncation_prime}" if best else "")
    )


@lru_cache(maxsize=1)
def twin_constant() -> float:
    """The pair value at ``d = 2``, i.e. twice the twin prime constant."""
    return singular_series((0, 2)).value


def _odd_prime_factors(n: int) -> list[int]:
    out = []
    n = abs(n)
    while n % 2 == 0 and n:
        n //= 2
    p = 3
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 2
    if n > 1:
        out.append(n)
    return out


def pair_value(d: int) -> float:
    """Singular series of ``{0, d}``: zero for odd ``d``, else ``S_2 * prod (p-1)/(p-2)``."""
    if d < 1:
        raise DomainError(f"d={d} must be at least 1")
    if d % 2:
        return 0.0
    ratio = 1.0
    for p in _odd_prime_factors(d):
        ratio *= (p - 1) / (p - 2)
    return twin_constant() * ratio


def _odd_ratio_table(h: int) -> np.ndarray:
    """``R[d] = prod_{p | d, p > 2} (p-1)/(p-2)`` for ``0 <= d <= h``."""
    R = np.ones(h + 1)
    for p in small_primes(h)[1:].tolist():
        R[p::p] *= (p - 1) / (p - 2)
    return R


def pair_sum(h: int) -> float:
    """Sum of :func:`pair_value` over ``1 <= d <= h``."""
    if h < 2:
        raise DomainError(f"h={h} must be at least 2")
    R = _odd_ratio_table(h)
    return twin_constant() * math.fsum(R[2::2].tolist())


@lru_cache(maxsize=4)
def _triple_baseline(P: int = 10**5) -> float:
    """``prod_{p>=5} (1 - 3/p)(1 - 1/p)**-3``."""
    pf = _primes_upto(P)[2:].astype(np.float64)
    finite = math.fsum((np.log1p(-3.0 / pf) - 3 * np.log1p(-1.0 / pf)).tolist())
    tail, _ = tail_log(3, P)
    return math.exp(finite + tail)


def _triple_tables(h: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-integer log corrections for primes ``p >= 5`` in the triple closed form.

    ``A[n]`` sums ``log((1-2/p)/(1-3/p))`` over ``p | n``; ``E[g]`` sums
    ``log((1-1/p)/(1-3/p)) - 3*log((1-2/p)/(1-3/p))`` over ``p | g``.
    """
    A = np.zeros(h + 1)
    E = np.zeros(h + 1)
    for p in small_primes(h)[2:].tolist():
        alpha = math.log1p(-2 / p) - math.log1p(-3 / p)
        beta = math.log1p(-1 / p) - math.log1p(-3 / p)
        A[p::p] += alpha
        E[p::p] += beta - 3 * alpha
    return A, E


def _triple_block(a: np.ndarray, b: np.ndarray, A: np.ndarray, E: np.ndarray) -> np.ndarray:
    a = a[:, None]
    b = b[None, :]
    diff = np.abs(a - b)
    f2 = np.where((a % 2 == 0) & (b % 2 == 0), 4.0, 0.0)
    ra, rb = a % 3, b % 3
    nu3 = 1 + (ra != 0) + ((rb != 0) & (rb != ra))
    f3 = np.choose(nu3 - 1, [9 / 4, 9 / 8, 0.0])
    logg = A[a] + A[b] + A[diff] + E[np.gcd(a, b)]
    out = _triple_baseline() * f2 * f3 * np.exp(logg)
    out[diff == 0] = 0.0
    return out


def triple_value(d1: int, d2: int) -> float:
    """Singular series of ``{0, d1, d2}`` from the closed multiplicative form."""
    if d1 < 1 or d2 < 1 or d1 == d2:
        raise DomainError(f"need distinct positive offsets, got d1={d1}, d2={d2}")
    A, E = _triple_tables(max(d1, d2))
    return float(_triple_block(np.array([d1]), np.array([d2]), A, E)[0, 0])


def triple_sum(h: int, block_rows: int = 512) -> float:
    """
    Sum of :func:`triple_value` over ordered pairs ``1 <= d1, d2 <= h``, ``d1 != d2``.

    The diagonal ``d1 == d2`` is excluded; the unordered sum over
    ``d1 < d2`` is exactly half the result.
    """
    if h < 3:
        raise DomainError(f"h={h} must be at least 3")
    A, E = _triple_tables(h)
    d = np.arange(1, h + 1)
    parts = []
    for i in range(0, h, block_rows):
        block = _triple_block(d[i : i + block_rows], d, A, E)
        parts.append(math.fsum(block.ravel().tolist()))
    return math.fsum(parts)


def hl_count(x: int, H, segment_len: int = DEFAULT_SEGMENT_LEN) -> int:
    """Number of ``1 <= n <= x`` with ``n + h`` prime for every offset ``h``."""
    if x < 2:
        raise DomainError(f"x={x} must be at least 2")
    H = OffsetTuple.coerce(H)
    top = H.offsets[-1]
    total = 0
    for a in range(1, x + 1, segment_len):
        b = min(a + segment_len, x + 1)
        mask = prime_mask(a, b + top)
        ok = np.ones(b - a, dtype=bool)
        for h in H.offsets:
            ok &= mask[h : h + b - a]
        total += int(ok.sum())
    return total


@dataclass(frozen=True)
class HLComparison:
    tuple: OffsetTuple
    x: int
    actual: int
    predicted: float
    ratio: float


def hl_compare(x: int, H) -> HLComparison:
    """Compare the tuple count with ``S(H) * x / (log x)**r``."""
    H = OffsetTuple.coerce(H)
    if not is_admissible(H):
        raise DomainError(f"tuple {H} is inadmissible; no Hardy-Littlewood prediction")
    actual = hl_count(x, H)
    predicted = singular_series(H).value * x / math.log(x) ** H.r
    return HLComparison(H, x, actual, predicted, actual / predicted)
