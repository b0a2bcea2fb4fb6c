"""Monte Carlo and exact-enumeration checks of Gaussian measure and moment bounds."""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import ndtr

from ._validation import check_positive_int
from .core import FiniteScalarDistribution, RandomStream
from .gauss1d import gaussian_mgf
from .nets import Net, SizingError
from .psi2 import psi2_batch

MOM_GROUPS = 32
CHUNK = 1 << 21


@dataclass
class McResult:
    estimate: float
    standard_error: float
    samples: int
    seed: int
    bound: float | None = None
    direction: str | None = None  # "==", ">=" or "<="
    satisfied: bool | None = None
    slack: float | None = None
    method: str = "mean"

    def compare(self, bound, direction, n_se=3.0):
        """Record a comparison against ``bound`` allowing ``n_se`` standard errors."""
        tol = n_se * self.standard_error
        if direction == ">=":
            slack = self.estimate - bound
        elif direction == "<=":
            slack = bound - self.estimate
        elif direction == "==":
            slack = -abs(self.estimate - bound)
        else:
            raise ValueError(direction)
        self.bound = float(bound)
        self.direction = direction
        self.slack = float(slack)
        self.satisfied = bool(slack >= -tol)
        return self

    def to_record(self, operation: str, params: dict) -> dict:
        rec = {"operation": operation, "params": params}
        rec.update({k: v for k, v in asdict(self).items()})
        rec["se"] = rec.pop("standard_error")
        return rec


def mc_gaussian_mgf_check(lam: float, samples: int, stream: RandomStream) -> McResult:
    """Estimate E[exp(lam g^2)] and compare with (1 - 2 lam)^(-1/2).

    For lam >= 1/4 the integrand has infinite variance, so the estimate is a
    median of means over 32 groups instead of a plain mean.
    """
    if lam > 0.4:
        raise ValueError("lam must be <= 0.4")
    samples = check_positive_int(samples, "samples")
    exact = gaussian_mgf(lam)
    g = stream.normal(samples)
    y = np.exp(lam * g * g)
    if lam >= 0.25:
        warnings.warn(
            f"exp({lam} g^2) has infinite variance; using median of {MOM_GROUPS} means",
            RuntimeWarning,
            stacklevel=2,
        )
        usable = samples - samples % MOM_GROUPS
        means = y[:usable].reshape(MOM_GROUPS, -1).mean(axis=1)
        est = float(np.median(means))
        se = float(np.std(means, ddof=1) / math.sqrt(MOM_GROUPS))
        method = "median-of-means"
    else:
        est = float(y.mean())
        se = float(y.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
        method = "mean"
    res = McResult(est, se, samples, stream.master_seed, method=method)
    return res.compare(exact, "==")


def single_w_tail_lower_bound(C: float, N: int) -> float:
    """1 - Pr[g <= sqrt(C ln 2N)]^N, the probability that one term alone exceeds 2N."""
    return float(-math.expm1(N * math.log(ndtr(math.sqrt(C * math.log(2 * N))))))


def single_w_tail_exact_n1(C: float) -> float:
    """Pr[exp(g^2/C) > 2] = Pr[|g| > sqrt(C ln 2)]."""
    return float(2.0 * ndtr(-math.sqrt(C * math.log(2.0))))


def mc_single_w_tail(C: float, N: int, trials: int, stream: RandomStream, method="importance") -> McResult:
    """Estimate Pr[sum_l exp(g_l^2 / C) > 2N] for N iid standard normals.

    ``method="plain"`` averages the indicator. ``method="importance"`` draws
    from a defensive mixture: with probability 1/2 all g_l are standard,
    otherwise one uniformly chosen g_l gets standard deviation
    sqrt(C ln 2N). Weights are the exact density ratio and never exceed 2, so
    the estimator stays unbiased while resolving probabilities far below
    1/trials. The result is compared with the single-maximum lower bound.
    """
    if C <= 2:
        raise ValueError("C must exceed 2 for E[exp(g^2/C)] to be finite")
    N = check_positive_int(N, "N")
    trials = check_positive_int(trials, "trials")
    if method not in ("plain", "importance"):
        raise ValueError("method must be 'plain' or 'importance'")
    sigma = math.sqrt(max(1.0, C * math.log(2 * N)))
    alpha = 0.5
    total = 0.0
    total_sq = 0.0
    done = 0
    per_chunk = max(1, CHUNK // N)
    while done < trials:
        m = min(per_chunk, trials - done)
        g = stream.normal((m, N))
        if method == "importance":
            tilt = stream.uniform(m) >= alpha
            which = stream.integers(0, N, size=m)
            rows = np.flatnonzero(tilt)
            g[rows, which[rows]] *= sigma
            # q/p = alpha + (1 - alpha) * mean_l phi_sigma(g_l) / phi(g_l)
            log_r = 0.5 * g * g * (1.0 - 1.0 / sigma**2) - math.log(sigma)
            ratio = alpha + (1.0 - alpha) * np.exp(log_r).mean(axis=1)
            w = 1.0 / ratio
        else:
            w = np.ones(m)
        hit = np.exp(g * g / C).sum(axis=1) > 2.0 * N
        vals = np.where(hit, w, 0.0)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        done += m
    est = total / trials
    var = max(0.0, total_sq / trials - est * est)
    se = math.sqrt(var / trials)
    res = McResult(est, se, trials, stream.master_seed, method=method)
    return res.compare(single_w_tail_lower_bound(C, N), ">=")


def single_w_tail_sweep(C: float, Ns, trials: int, stream: RandomStream, method="importance") -> list:
    """One McResult per N, each on its own derived substream."""
    return [mc_single_w_tail(C, N, trials, stream.derive(N), method) for N in Ns]


@dataclass
class BodyMeasureResult:
    inside: float
    outside: float
    indeterminate: float
    trials: int
    seed: int
    standard_error: float

    def as_mc(self) -> McResult:
        return McResult(self.inside, self.standard_error, self.trials, self.seed, method="classify")


def classify_blocks(blocks, net: Net, delta: float, tol=1e-10) -> str:
    """'inside', 'outside' or 'indeterminate' for one (N, n) block array."""
    blocks = np.asarray(blocks, dtype=np.float64)
    N = blocks.shape[0]
    lower = float(np.max(psi2_batch(net.points @ blocks.T, np.full(N, 1.0 / N), tol)))
    upper = lower / (1.0 - net.epsilon)
    if upper <= 2.0 + delta:
        return "inside"
    if lower > 2.0 + delta:
        return "outside"
    return "indeterminate"


def mc_body_measure(n: int, N: int, delta: float, net: Net, trials: int, stream: RandomStream, tol=1e-10) -> BodyMeasureResult:
    """Classify Gaussian samples of (y_1..y_N) by the psi_2,inf bracket of a uniform block."""
    n = check_positive_int(n, "n")
    N = check_positive_int(N, "N")
    trials = check_positive_int(trials, "trials")
    if delta <= 0:
        raise ValueError("delta must be positive")
    if n * N > 10**4:
        raise SizingError(f"n*N = {n * N} exceeds 10^4")
    if net.dimension != n:
        raise ValueError("net dimension does not match n")
    limit = 2.0 + delta
    counts = np.zeros(3, dtype=np.int64)
    W = len(net)
    per_chunk = max(1, CHUNK // max(1, N * W))
    done = 0
    while done < trials:
        m = min(per_chunk, trials - done)
        y = stream.normal((m, N, n))
        proj = np.einsum("mNn,wn->mwN", y, net.points).reshape(m * W, N)
        lower = psi2_batch(proj, np.full(N, 1.0 / N), tol).reshape(m, W).max(axis=1)
        upper = lower / (1.0 - net.epsilon)
        inside = upper <= limit
        outside = lower > limit
        counts += [int(inside.sum()), int(outside.sum()), int((~inside & ~outside).sum())]
        done += m
    freqs = counts / trials
    se = math.sqrt(freqs[0] * (1.0 - freqs[0]) / trials)
    return BodyMeasureResult(float(freqs[0]), float(freqs[1]), float(freqs[2]), trials, stream.master_seed, se)


def body_measure_n1_exact(delta: float) -> float:
    """Inside probability for n = N = 1: |g| / sqrt(ln 2) <= 2 + delta."""
    a = (2.0 + delta) * math.sqrt(math.log(2.0))
    return float(1.0 - 2.0 * ndtr(-a))


@dataclass
class RosenthalResult:
    lhs: float
    rhs: float
    ratio: float
    satisfied: bool


def sum_distribution(dist: FiniteScalarDistribution, N: int, max_outcomes=10**7):
    """Exact law of X_1 + ... + X_N for iid copies; equal sums are merged."""
    N = check_positive_int(N, "N")
    k = int(np.count_nonzero(dist.probabilities))
    if k**N > max_outcomes:
        raise SizingError(f"support^N = {k}^{N} exceeds {max_outcomes}")
    keep = dist.probabilities > 0
    vals, probs = dist.values[keep], dist.probabilities[keep]
    sv, sp = np.zeros(1), np.ones(1)
    for _ in range(N):
        sv = (sv[:, None] + vals[None, :]).ravel()
        sp = (sp[:, None] * probs[None, :]).ravel()
        sv, inv = np.unique(sv, return_inverse=True)
        sp = np.bincount(inv.ravel(), weights=sp)
    return sv, sp


def rosenthal_check(dist: FiniteScalarDistribution, N: int, p: float) -> RosenthalResult:
    """Exact E|X_1+...+X_N|^p against 2^p max((sum E|X|^p)^(1/p), (sum E X^2)^(1/2))."""
    if p < 2:
        raise ValueError("p must be >= 2")
    if abs(dist.mean()) > 1e-12:
        raise ValueError(f"distribution has mean {dist.mean()!r}, not 0")
    if N > 20:
        raise SizingError("N must be <= 20")
    sv, sp = sum_distribution(dist, N)
    lhs = float(sp @ np.abs(sv) ** p) ** (1.0 / p)
    rhs = 2.0**p * max((N * dist.moment(p)) ** (1.0 / p), math.sqrt(N * dist.moment(2)))
    ratio = lhs / rhs if rhs > 0 else 0.0
    return RosenthalResult(lhs, rhs, ratio, ratio <= 1.0)
