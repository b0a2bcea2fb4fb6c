"""One-dimensional Gaussian geometry on intervals."""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import ndtr, ndtri

DEFAULT_BETA = 0.2001


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; ``Interval.empty()`` is the empty set.

    Infinite endpoints are allowed so whole-line and half-line sets can be
    measured.
    """

    lo: float
    hi: float
    is_empty: bool = False

    def __post_init__(self):
        if self.is_empty:
            return
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval endpoints must not be NaN")
        if self.lo > self.hi:
            raise ValueError(f"interval needs lo <= hi, got [{self.lo}, {self.hi}]")

    @classmethod
    def empty(cls) -> "Interval":
        return cls(math.nan, math.nan, True)

    @classmethod
    def symmetric(cls, a: float) -> "Interval":
        return cls(-a, a)

    @property
    def length(self) -> float:
        return 0.0 if self.is_empty else self.hi - self.lo

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return not self.is_empty and self.lo - slack <= x <= self.hi + slack

    def contains_interval(self, other: "Interval", slack: float = 0.0) -> bool:
        if other.is_empty:
            return True
        return not self.is_empty and self.lo - slack <= other.lo and other.hi <= self.hi + slack

    def intersect(self, other: "Interval") -> "Interval":
        if self.is_empty or other.is_empty:
            return Interval.empty()
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else Interval.empty()

    def shift(self, d: float) -> "Interval":
        return self if self.is_empty else Interval(self.lo + d, self.hi + d)

    def scale(self, c: float) -> "Interval":
        if self.is_empty:
            return self
        a, b = c * self.lo, c * self.hi
        return Interval(min(a, b), max(a, b))

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        return not self.is_empty and abs(self.lo + self.hi) <= tol * max(1.0, abs(self.hi))


WHOLE_LINE = Interval(-math.inf, math.inf)


def gaussian_measure(iv: Interval) -> float:
    """Standard normal mass of ``iv``.

    Differences are taken on the side of zero where both tail values are
    small, which keeps the absolute error near machine precision.
    """
    if iv.is_empty:
        return 0.0
    lo, hi = iv.lo, iv.hi
    if lo >= 0:
        val = ndtr(-lo) - ndtr(-hi)
    elif hi <= 0:
        val = ndtr(hi) - ndtr(lo)
    else:
        val = 1.0 - ndtr(lo) - ndtr(-hi)
    return float(min(1.0, max(0.0, val)))


def symmetric_interval_for_measure(p: float) -> Interval:
    """[-a, a] with standard normal mass ``p``."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    # quantile of the upper tail (1-p)/2 avoids cancellation in (1+p)/2 when p ~ 1
    a = -float(ndtri((1.0 - p) / 2.0))
    return Interval(-a, a)


def star_1d(K: Interval, u: float) -> Interval:
    """Banaszczyk's star body K * u on the real line.

    The only line in direction u is the whole line; it is long when K has
    length at least 2|u|, and then (K + u) U (K - u) is the single interval
    [lo - |u|, hi + |u|]. Otherwise there is no long line and the result is
    empty.
    """
    if K.is_empty:
        raise ValueError("star_1d needs a non-empty body")
    a = abs(float(u))
    if K.hi - K.lo >= 2.0 * a:
        return Interval(K.lo - a, K.hi + a)
    return Interval.empty()


def gaussian_mgf(lam: float) -> float:
    """E[exp(lam * g^2)] for g ~ N(0, 1); diverges for lam >= 1/2."""
    if lam >= 0.5:
        raise ValueError("E[exp(lam g^2)] is infinite for lam >= 1/2")
    return 1.0 / math.sqrt(1.0 - 2.0 * lam)


def beta_is_admissible(beta: float) -> bool:
    """Whether the mass of [-beta, beta] is below the mass of [1, inf)."""
    return 0.0 < beta and gaussian_measure(Interval(-beta, beta)) < gaussian_measure(Interval(1.0, math.inf))
