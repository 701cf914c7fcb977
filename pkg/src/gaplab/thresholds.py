"""
Iterated logarithms, logorials and the gap-threshold families.

A threshold family assigns to each integer ``t`` a positive ``lam(t)`` and
the gap bound ``y(t) = lam(t) * log t``. Four families are supported:

``fixed:L``           constant ``lam = L``
``logk:k``            ``lam = 1 / Log_k(t)`` (the divergent family)
``logk-eps:k,eps``    ``lam = 1 / (Log_k(t) * log_k(t)**eps)`` (the convergent family)
``adaptive:k0``       ``1 / Log_k(t)`` with ``k`` raised by one each time the
                      running reciprocal sum passes 1 (see :class:`AdaptiveState`)

where ``log_k`` is the k-fold logarithm and ``Log_k = log_2 * ... * log_k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .errors import DomainError

FAMILIES = ("fixed", "divergent", "convergent", "adaptive")
_GRAMMAR = {"fixed": "fixed", "divergent": "logk", "convergent": "logk-eps", "adaptive": "adaptive"}


def iter_log(k: int, t: float) -> float:
    """``log`` applied ``k`` times to ``t``."""
    if k < 1:
        raise DomainError(f"k={k} must be at least 1")
    v = float(t)
    for j in range(k):
        if v <= 0:
            raise DomainError(f"log_{k}({t}) undefined: log_{j}({t}) = {v} is not positive")
        v = math.log(v)
    return v


def logorial(k: int, t: float) -> float:
    """``Log_k(t)``, the product of ``log_j(t)`` for ``2 <= j <= k``."""
    if k < 2:
        raise DomainError(f"k={k} must be at least 2")
    v = math.log(float(t)) if t > 0 else -1.0
    prod = 1.0
    for j in range(2, k + 1):
        if v <= 0:
            raise DomainError(f"Log_{k}({t}) undefined: log_{j - 1}({t}) is not positive")
        v = math.log(v)
        prod *= v
    if v <= 0:
        raise DomainError(f"Log_{k}({t}) undefined: log_{k}({t}) = {v} is not positive")
    return prod


@lru_cache(maxsize=None)
def domain_floor(k: int) -> int | float:
    """
    Smallest integer ``t`` with ``log_k(t) > 0``.

    That is ``floor(E) + 1`` for the tower ``E = exp(exp(...exp(1)))`` with
    ``k - 1`` exponentials. For ``k >= 5`` the tower has over a million
    digits; ``math.inf`` is returned since no reachable ``t`` clears it.
    """
    if k < 1:
        raise DomainError(f"k={k} must be at least 1")
    if k == 1:
        return 2
    if k >= 5:
        return math.inf
    with mpmath.workdps(40):
        tower = mpmath.mpf(1)
        for _ in range(k - 1):
            tower = mpmath.exp(tower)
        return int(mpmath.floor(tower)) + 1


def _iter_logs(t: np.ndarray, k: int) -> list[np.ndarray]:
    """``[log_1 t, ..., log_k t]`` for an array of arguments already above the floor."""
    out = [np.log(np.asarray(t, dtype=np.float64))]
    for _ in range(k - 1):
        out.append(np.log(out[-1]))
    return out


def logorial_array(k: int, t: np.ndarray) -> np.ndarray:
    logs = _iter_logs(t, k)
    prod = np.ones_like(logs[0])
    for v in logs[1:]:
        prod *= v
    return prod


@dataclass
class AdaptiveState:
    """
    Running state of the adaptive family.

    The index ``current_k`` moves to ``current_k + 1`` at the first element
    ``t`` for which the running sum already exceeds 1 and ``t`` is at least
    ``domain_floor(current_k + 2)``, so that ``log_{k+1}`` of the new family
    is positive. The switch applies to ``t`` itself.
    """

    current_k: int
    running_sum: float = 0.0
    switch_points: list[tuple[int, int]] = field(default_factory=list)

    def eligible(self, t: int) -> bool:
        return self.running_sum > 1 and t >= domain_floor(self.current_k + 2)

    def advance(self, t: int) -> bool:
        """Apply the switch rule at ``t``; return whether ``k`` was raised."""
        if self.eligible(t):
            self.current_k += 1
            self.switch_points.append((int(t), self.current_k))
            return True
        return False


@dataclass(frozen=True)
class ThresholdSpec:
    """A lambda-family; build with :meth:`fixed`, :meth:`divergent`, ... or :meth:`parse`."""

    family: str
    lambda0: float | None = None
    k: int | None = None
    eps: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown threshold family {self.family!r}")
        if self.family == "fixed":
            if self.lambda0 is None or not self.lambda0 > 0:
                raise DomainError(f"fixed threshold needs lambda0 > 0, got {self.lambda0}")
        else:
            if self.k is None or self.k < 2:
                raise DomainError(f"{self.family} threshold needs k >= 2, got {self.k}")
        if self.family == "convergent" and (self.eps is None or not self.eps > 0):
            raise DomainError(f"convergent threshold needs eps > 0, got {self.eps}")

    @classmethod
    def fixed(cls, lambda0: float) -> ThresholdSpec:
        return cls("fixed", lambda0=float(lambda0))

    @classmethod
    def divergent(cls, k: int) -> ThresholdSpec:
        return cls("divergent", k=int(k))

    @classmethod
    def convergent(cls, k: int, eps: float) -> ThresholdSpec:
        return cls("convergent", k=int(k), eps=float(eps))

    @classmethod
    def adaptive(cls, k0: int) -> ThresholdSpec:
        return cls("adaptive", k=int(k0))

    @classmethod
    def parse(cls, text: str) -> ThresholdSpec:
        """Parse ``fixed:0.5``, ``logk:2``, ``logk-eps:2,0.5`` or ``adaptive:2``."""
        name, sep, arg = text.strip().partition(":")
        try:
            if not sep:
                raise ValueError
            if name == "fixed":
                return cls.fixed(float(arg))
            if name == "logk":
                return cls.divergent(int(arg))
            if name == "logk-eps":
                k, eps = arg.split(",")
                return cls.convergent(int(k), float(eps))
            if name == "adaptive":
                return cls.adaptive(int(arg))
        except ValueError as exc:
            if isinstance(exc, DomainError):
                raise
        raise DomainError(
            f"bad threshold {text!r}; expected fixed:L, logk:K, logk-eps:K,EPS or adaptive:K"
        )

    def __str__(self) -> str:
        tag = _GRAMMAR[self.family]
        if self.family == "fixed":
            return f"{tag}:{self.lambda0!r}"
        if self.family == "convergent":
            return f"{tag}:{self.k},{self.eps!r}"
        return f"{tag}:{self.k}"

    @property
    def grammar_name(self) -> str:
        return _GRAMMAR[self.family]

    @property
    def domain_floor(self) -> int:
        if self.family == "fixed":
            return 2
        return domain_floor(self.k)

    @property
    def side_condition_holds(self) -> bool:
        """Whether ``lam(t) >> 1/(log log t)**2`` holds for this family (metadata only)."""
        if self.family == "convergent" and self.k == 2:
            return self.eps <= 1
        return True

    def new_state(self) -> AdaptiveState:
        if self.family != "adaptive":
            raise DomainError(f"{self} carries no adaptive state")
        return AdaptiveState(self.k)

    def _check(self, t) -> None:
        if t < self.domain_floor:
            raise DomainError(f"t={t} is below the domain floor {self.domain_floor} of {self}")

    def lam(self, t: int, state: AdaptiveState | None = None) -> float:
        """Point evaluation of ``lam(t)``; advances ``state`` for the adaptive family."""
        self._check(t)
        if self.family == "fixed":
            return self.lambda0
        if self.family == "divergent":
            return 1.0 / logorial(self.k, t)
        if self.family == "convergent":
            return 1.0 / (logorial(self.k, t) * iter_log(self.k, t) ** self.eps)
        if state is None:
            raise DomainError("adaptive threshold evaluated without an AdaptiveState")
        state.advance(t)
        return 1.0 / logorial(state.current_k, t)

    def y(self, t: int, state: AdaptiveState | None = None) -> float:
        return self.lam(t, state) * math.log(t)

    def lam_array(self, t: np.ndarray, k: int | None = None) -> np.ndarray:
        """
        Vectorized ``lam`` for arguments at or above the domain floor.

        ``k`` selects the index for the adaptive family, which has no
        state-free vectorized form.
        """
        t = np.asarray(t)
        if self.family == "fixed":
            return np.full(t.shape, self.lambda0)
        if self.family == "adaptive":
            if k is None:
                raise DomainError("adaptive threshold needs an explicit k for array evaluation")
            return 1.0 / logorial_array(k, t)
        logs = _iter_logs(t, self.k)
        prod = np.ones_like(logs[0])
        for v in logs[1:]:
            prod *= v
        if self.family == "convergent":
            prod *= logs[-1] ** self.eps
        return 1.0 / prod

    def y_array(self, t: np.ndarray, k: int | None = None) -> np.ndarray:
        return self.lam_array(t, k) * np.log(np.asarray(t, dtype=np.float64))

    def comparator(self, x: int, k: int | None = None) -> float | None:
        """``log_{k+1}(x)``, the growth the divergent sum is compared with; None unless positive."""
        k = self.k if k is None else k
        if self.family == "fixed" or k is None or x < domain_floor(k + 1):
            return None
        return iter_log(k + 1, x)


def eval_lambda(spec: ThresholdSpec, t: int, state: AdaptiveState | None = None) -> float:
    return spec.lam(t, state)


def eval_y(spec: ThresholdSpec, t: int, state: AdaptiveState | None = None) -> float:
    return spec.y(t, state)
