"""Subgaussian (psi_2) norms of finitely supported distributions.

For a real random variable X the psi_2 norm is the smallest t > 0 with
E[exp(X^2 / t^2)] <= 2. On a finite support the map t -> E[exp(X^2/t^2)] is
strictly decreasing, so the norm is found by bisection. Sums are evaluated in
log space so large ratios |x|/t never overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._validation import check_vector
from .core import FiniteScalarDistribution, FiniteVectorDistribution

LN2 = math.log(2.0)
MAX_ITER = 200
DEFAULT_TOL = 1e-12
ULP_GUARD = 8


@dataclass(frozen=True)
class Psi2Bracket:
    """Two-sided bound ``lower <= ||X||_{psi_2,inf} <= upper`` from a net."""

    lower: float
    upper: float
    net_epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.net_epsilon < 1.0:
            raise ValueError("net_epsilon must lie in [0, 1)")
        if not 0.0 <= self.lower <= self.upper:
            raise ValueError("bracket needs 0 <= lower <= upper")


def psi2_batch(values, probabilities, tol=DEFAULT_TOL):
    """Vectorised psi_2 norm of many finite distributions at once.

    Parameters
    ----------
    values : array (m, k)
        Row ``r`` holds the atoms of distribution ``r``.
    probabilities : array (k,) or (m, k)
        Atom weights, shared across rows or given per row.
    tol : float
        Absolute width of the final bisection bracket.

    Returns
    -------
    ndarray (m,)
        Upper end of the final bracket, raised by a few ulps so that
        E[exp(X^2/t^2)] <= 2 still holds after rounding. Rows whose charged
        atoms are all zero get 0.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.atleast_2d(np.asarray(values, dtype=np.float64))
    p = np.broadcast_to(np.asarray(probabilities, dtype=np.float64), x.shape)
    charged = p > 0
    sq = np.where(charged, x * x, 0.0)
    with np.errstate(divide="ignore"):
        logp = np.where(charged, np.log(np.where(charged, p, 1.0)), -np.inf)

    amax = np.sqrt(sq.max(axis=1))
    zero = amax == 0.0
    hi = np.maximum(1.0, amax) / math.sqrt(LN2)
    lo = np.zeros_like(hi)
    active = ~zero
    for _ in range(MAX_ITER):
        if not np.any(active):
            break
        mid = 0.5 * (lo[active] + hi[active])
        with np.errstate(over="ignore"):
            expo = sq[active] / (mid * mid)[:, None] + logp[active]
        too_small = logsumexp(expo, axis=1) > LN2
        idx = np.flatnonzero(active)
        lo[idx[too_small]] = mid[too_small]
        hi[idx[~too_small]] = mid[~too_small]
        active = active & ((hi - lo) > tol)
    hi = hi * (1.0 + ULP_GUARD * np.finfo(np.float64).eps)
    hi[zero] = 0.0
    return hi


def psi2_scalar(dist: FiniteScalarDistribution, tol=DEFAULT_TOL) -> float:
    """psi_2 norm of a finite scalar distribution, accurate to ``tol`` in t."""
    return float(psi2_batch(dist.values[None, :], dist.probabilities, tol)[0])


def psi2_gaussian_analytic() -> float:
    # (1 - 2/t^2)^(-1/2) = 2  <=>  t^2 = 8/3
    return math.sqrt(8.0 / 3.0)


def psi2_vector_bracket(dist: FiniteVectorDistribution, net, tol=DEFAULT_TOL) -> Psi2Bracket:
    """Bracket the psi_2,inf norm using the directions of an epsilon-net.

    The lower end is the largest psi_2 norm over net directions; since every
    unit vector is a short conic combination of net points, the true value is
    at most ``lower / (1 - net.epsilon)``.
    """
    if len(net.points) == 0:
        raise ValueError("empty net")
    if net.dimension != dist.dimension:
        raise ValueError(f"net dimension {net.dimension} != distribution dimension {dist.dimension}")
    lower = float(np.max(psi2_batch(net.points @ dist.vectors.T, dist.probabilities, tol)))
    return Psi2Bracket(lower, lower / (1.0 - net.epsilon), net.epsilon)


def psi2_empirical(samples, tol=DEFAULT_TOL) -> float:
    """Plug-in estimate: psi_2 of the uniform distribution on ``samples``.

    This is an estimator, not a certificate; exp(X^2/t^2) is heavy tailed and
    the estimate carries no error bar.
    """
    samples = check_vector(samples, name="samples")
    if samples.size < 2:
        raise ValueError("psi2_empirical needs at least 2 samples")
    return float(psi2_batch(samples[None, :], np.full(samples.size, 1.0 / samples.size), tol)[0])
