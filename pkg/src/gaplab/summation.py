"""Mergeable compensated accumulator."""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np


class CompensatedSum:
    """
    Running sum kept as an unevaluated pair ``hi + lo``.

    Each batch is folded in with :func:`math.fsum`, which rounds the exact
    sum once; the rounding residual is carried in ``lo``. Two accumulators
    over adjacent ranges merge to the whole-range result regardless of how
    either side was batched, up to a few units in the last place.
    """

    __slots__ = ("hi", "lo")

    def __init__(self, hi: float = 0.0, lo: float = 0.0):
        self.hi = float(hi)
        self.lo = float(lo)

    def add(self, values: Iterable[float] | np.ndarray) -> CompensatedSum:
        if isinstance(values, np.ndarray):
            values = values.tolist()
        terms = [self.hi, self.lo, *values]
        s = math.fsum(terms)
        terms.append(-s)
        self.hi, self.lo = s, math.fsum(terms)
        return self

    def merge(self, other: CompensatedSum) -> CompensatedSum:
        return self.add([other.hi, other.lo])

    def copy(self) -> CompensatedSum:
        return CompensatedSum(self.hi, self.lo)

    @property
    def value(self) -> float:
        return self.hi + self.lo

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return f"CompensatedSum({self.value!r})"
