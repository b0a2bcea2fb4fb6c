"""Online signing strategies.

Every signer is a scikit-learn style estimator. Hyper-parameters go to the
constructor; ``start(n)`` resets the online state, ``step(v)`` consumes one
vector and returns its irrevocable sign. ``fit(X)`` runs the rows of ``X``
through a fresh state, ``partial_fit(X)`` continues the current run.
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import NORM_SLACK, check_positive_int, check_vectors
from .core import RandomStream, Transcript
from .tree import CertifiedDistribution

TIE_TOL = 1e-12


class HorizonExhausted(RuntimeError):
    """The signer was asked for more steps than it was built for."""


class OnlineSigner(BaseEstimator):
    """Base class holding the running prefix sum and the record of the run."""

    def __init__(self, seed=0, stream_id=0):
        self.seed = seed
        self.stream_id = stream_id

    def start(self, n: int, stream: RandomStream | None = None):
        self.n_features_in_ = check_positive_int(n, "n")
        self.stream_ = stream if stream is not None else RandomStream(self.seed, self.stream_id)
        self.prefix_ = np.zeros(n)
        self.inputs_ = []
        self.signs_ = []
        self._reset()
        return self

    def _reset(self):
        pass

    def _choose(self, v: np.ndarray) -> int:
        raise NotImplementedError

    def step(self, v) -> int:
        check_is_fitted(self, "prefix_")
        v = np.asarray(v, dtype=np.float64).reshape(-1)
        if v.size != self.n_features_in_:
            raise ValueError(f"vector has dimension {v.size}, signer expects {self.n_features_in_}")
        if not np.all(np.isfinite(v)):
            raise ValueError("vector has non-finite coordinates")
        norm = math.sqrt(float(v @ v))
        if norm > 1.0 + NORM_SLACK:
            raise ValueError(f"vector norm {norm:.15g} exceeds 1")
        x = self._choose(v)
        self.prefix_ = self.prefix_ + x * v
        self.inputs_.append(v)
        self.signs_.append(x)
        return x

    def partial_fit(self, X, y=None):
        X = check_vectors(X)
        if not hasattr(self, "prefix_"):
            self.start(X.shape[1])
        for v in X:
            self.step(v)
        return self

    def fit(self, X, y=None):
        X = check_vectors(X)
        self.start(X.shape[1])
        for v in X:
            self.step(v)
        return self

    def fit_predict(self, X, y=None):
        """Signs emitted for the rows of ``X`` by a fresh run."""
        return np.array(self.fit(X).signs_, dtype=np.int64)

    def fit_transform(self, X, y=None):
        """Prefix sums after each row of ``X`` for a fresh run."""
        return self.fit(X).transcript().prefix_sums

    def transcript(self, meta=None) -> Transcript:
        check_is_fitted(self, "prefix_")
        inputs = np.array(self.inputs_).reshape(len(self.inputs_), self.n_features_in_)
        return Transcript.from_signs(inputs, self.signs_, meta)


class UniformRandomSigner(OnlineSigner):
    """Independent fair coin flips."""

    def _choose(self, v):
        return 1 if self.stream_.uniform() < 0.5 else -1


class GreedySigner(OnlineSigner):
    """Sign that points away from the current prefix; +1 on ties."""

    def _choose(self, v):
        dot = float(self.prefix_ @ v)
        if abs(dot) <= TIE_TOL:
            return 1
        return -1 if dot > 0 else 1


class SelfBalancingWalkSigner(OnlineSigner):
    """+1 with probability clamp(1/2 - <prefix, v>/(2c), 0, 1).

    External baseline. When ``c`` is None it is derived from ``horizon`` as
    10 * sqrt(ln(2 n T)).
    """

    def __init__(self, c=None, horizon=None, seed=0, stream_id=0):
        super().__init__(seed=seed, stream_id=stream_id)
        self.c = c
        self.horizon = horizon

    def _reset(self):
        c = self.c
        if c is None:
            if self.horizon is None:
                raise ValueError("self-balancing walk needs c or a horizon to derive it")
            c = 10.0 * math.sqrt(math.log(2 * self.n_features_in_ * self.horizon))
        if not c > 0:
            raise ValueError(f"c must be positive, got {c}")
        self.c_ = float(c)

    def plus_probability(self, v) -> float:
        p = 0.5 - float(self.prefix_ @ np.asarray(v, dtype=np.float64)) / (2.0 * self.c_)
        return min(1.0, max(0.0, p))

    def _choose(self, v):
        return 1 if self.stream_.uniform() < self.plus_probability(v) else -1


class TreeCertifiedSigner(OnlineSigner):
    """Follows one sign vector drawn from a certified tree distribution.

    At start a clone index l is drawn uniformly (or pinned by ``clone``).
    Each input is normalised, snapped to its nearest net point, and the
    signer moves to the child edge labelled with that point, emitting the
    stored sign of clone l. The zero vector gets +1 and does not move.
    """

    def __init__(self, certificate: CertifiedDistribution | None = None, horizon=None, clone=None, seed=0, stream_id=0):
        super().__init__(seed=seed, stream_id=stream_id)
        self.certificate = certificate
        self.horizon = horizon
        self.clone = clone

    def _reset(self):
        cert = self.certificate
        if cert is None:
            raise ValueError("tree-certified signer needs a certificate")
        tree = cert.base
        if tree.dimension != self.n_features_in_:
            raise ValueError(f"certificate is for dimension {tree.dimension}, got {self.n_features_in_}")
        depth = int(tree.depths().max())
        horizon = depth if self.horizon is None else int(self.horizon)
        if horizon > depth:
            raise ValueError(f"horizon {horizon} exceeds the certified tree depth {depth}")
        self.horizon_ = horizon
        self.clone_ = cert.sample_clone(self.stream_) if self.clone is None else int(self.clone)
        if not 1 <= self.clone_ <= cert.n_clones:
            raise ValueError(f"clone index must lie in 1..{cert.n_clones}")
        self.position_ = tree.root
        self.steps_taken_ = 0
        net = cert.net
        self._child_by_point = {}
        for node in range(tree.n_nodes):
            for c in tree.children(node):
                k, dist = net.nearest(tree.vectors[c] / max(np.linalg.norm(tree.vectors[c]), 1e-300))
                if dist <= 1e-9 and abs(np.linalg.norm(tree.vectors[c]) - 1.0) <= 1e-9:
                    self._child_by_point.setdefault((node, k), c)

    def _choose(self, v):
        if self.steps_taken_ >= self.horizon_:
            raise HorizonExhausted(f"certified horizon of {self.horizon_} steps is used up")
        self.steps_taken_ += 1
        norm = math.sqrt(float(v @ v))
        if norm == 0.0:
            return 1
        k, _ = self.certificate.net.nearest(v / norm)
        child = self._child_by_point.get((self.position_, k))
        if child is None:
            raise ValueError(f"no certified edge from node {self.position_} for net point {k}")
        self.position_ = child
        return int(self.certificate.signs[child, self.clone_ - 1])


STRATEGIES = {
    "uniform-random": UniformRandomSigner,
    "greedy": GreedySigner,
    "self-balancing-walk": SelfBalancingWalkSigner,
    "tree-certified": TreeCertifiedSigner,
}


def make_signer(strategy: str, n: int, params: dict | None = None, stream: RandomStream | None = None) -> OnlineSigner:
    """Create and start a signer; unknown strategies or parameters are rejected."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {sorted(STRATEGIES)}")
    cls = STRATEGIES[strategy]
    params = dict(params or {})
    allowed = set(cls().get_params()) - {"seed", "stream_id"}
    unknown = set(params) - allowed
    if unknown:
        raise ValueError(f"unknown parameters for {strategy}: {sorted(unknown)}")
    if strategy == "self-balancing-walk" and params.get("c") is None and params.get("horizon") is None:
        raise ValueError("self-balancing-walk requires parameter c (or horizon)")
    if strategy == "tree-certified" and params.get("certificate") is None:
        raise ValueError("tree-certified requires a certificate")
    signer = cls(**params)
    if stream is not None:
        signer.set_params(seed=stream.master_seed, stream_id=stream.stream_id)
    return signer.start(n, stream)
