"""Input sequence generators that play against online signers."""
from __future__ import annotations

import math

import numpy as np

from ._validation import check_positive_int, check_vector, check_vectors
from .core import RandomStream, Transcript


class AdversaryExhausted(RuntimeError):
    pass


def _rot90(u):
    return np.array([-u[1], u[0]])


def block_length(T: int, log_base="2") -> int:
    """k = ceil(log(T) / 2), at least 1."""
    if log_base in ("2", 2):
        lg = math.log2(T)
    elif log_base in ("e", "ln"):
        lg = math.log(T)
    else:
        raise ValueError(f"log_base must be '2' or 'e', got {log_base!r}")
    return max(1, math.ceil(0.5 * lg))


class Adversary:
    """Common bookkeeping: dimension, horizon and a step counter."""

    kind = "base"
    adaptive = False

    def __init__(self, n: int, T: int, stream: RandomStream | None = None):
        self.n = check_positive_int(n, "n")
        self.T = check_positive_int(T, "T")
        self.stream = stream if stream is not None else RandomStream(0, 0)
        self.t = 0

    def next(self, algorithm_prefix=None) -> np.ndarray:
        if self.t >= self.T:
            raise AdversaryExhausted(f"horizon T={self.T} reached")
        if self.adaptive and algorithm_prefix is None:
            raise ValueError(f"{self.kind} adversary needs the algorithm's prefix sum")
        v = self._emit(algorithm_prefix)
        self.t += 1
        return v

    def _emit(self, prefix):
        raise NotImplementedError


class ObliviousBlockAdversary(Adversary):
    """Blocks of k unit vectors in the plane, each orthogonal to the y-signed block sum.

    All block signs y are drawn at construction, so the emitted sequence is a
    function of the seed alone. The first vector of a block is e_1; vector
    i is the +90 degree rotation of the normalised sum of y_j v_j, j < i.
    Dimensions above 2 are zero padded.
    """

    kind = "oblivious-block"

    def __init__(self, n: int, T: int, stream: RandomStream | None = None, log_base="2"):
        super().__init__(n, T, stream)
        if self.n < 2:
            raise ValueError("oblivious-block needs n >= 2")
        self.k = block_length(self.T, log_base)
        self.n_blocks = math.ceil(self.T / self.k)
        self.y = self.stream.signs((self.n_blocks, self.k)).astype(np.int64)
        self.vectors = self._precompute()

    def _precompute(self):
        out = np.zeros((self.T, self.n))
        for t in range(self.T):
            b, i = divmod(t, self.k)
            if i == 0:
                acc = np.zeros(2)
                v = np.array([1.0, 0.0])
            else:
                v = _rot90(acc / math.sqrt(float(acc @ acc)))
            acc = acc + self.y[b, i] * v
            out[t, :2] = v
        return out

    def block_slices(self):
        """(start, stop) of every complete block."""
        return [(b * self.k, (b + 1) * self.k) for b in range(self.T // self.k)]

    def _emit(self, prefix):
        return self.vectors[self.t].copy()


class AdaptiveOrthogonalAdversary(Adversary):
    """Unit vector orthogonal to the algorithm's current prefix (e_1 at zero)."""

    kind = "adaptive-orthogonal"
    adaptive = True

    def __init__(self, n: int, T: int, stream: RandomStream | None = None):
        super().__init__(n, T, stream)
        if self.n != 2:
            raise ValueError("adaptive-orthogonal is defined for n = 2")

    def _emit(self, prefix):
        p = check_vector(prefix, 2, name="algorithm_prefix")
        norm = math.sqrt(float(p @ p))
        if norm == 0.0:
            return np.array([1.0, 0.0])
        return _rot90(p / norm)


class FixedSequenceAdversary(Adversary):
    kind = "fixed-sequence"

    def __init__(self, vectors, stream: RandomStream | None = None):
        vectors = check_vectors(vectors, name="vectors")
        super().__init__(vectors.shape[1], vectors.shape[0], stream)
        self.vectors = vectors

    @classmethod
    def from_transcript_csv(cls, text: str) -> "FixedSequenceAdversary":
        return cls(Transcript.from_csv(text).inputs)

    def _emit(self, prefix):
        return self.vectors[self.t].copy()


class IIDSamplerAdversary(Adversary):
    """Independent draws, uniform on the sphere or on {-1, 1}^n / sqrt(n)."""

    kind = "iid-sampler"

    def __init__(self, n: int, T: int, stream: RandomStream | None = None, distribution="sphere"):
        super().__init__(n, T, stream)
        if distribution not in ("sphere", "cube"):
            raise ValueError("distribution must be 'sphere' or 'cube'")
        self.distribution = distribution

    def _emit(self, prefix):
        if self.distribution == "sphere":
            g = self.stream.normal(self.n)
            return g / np.linalg.norm(g)
        return self.stream.signs(self.n) / math.sqrt(self.n)


class EdgeStreamAdversary(Adversary):
    """Edge vectors (e_u - e_v)/sqrt(2) over vertices labelled 1..n.

    Edges come from ``edges`` when given, else uniformly random pairs u != v.
    """

    kind = "edge-stream"

    def __init__(self, n: int, T: int, stream: RandomStream | None = None, edges=None):
        super().__init__(n, T, stream)
        if self.n < 2:
            raise ValueError("edge-stream needs at least 2 vertices")
        if edges is not None:
            edges = [(int(u), int(v)) for u, v in edges]
            if len(edges) < self.T:
                raise ValueError(f"edge list has {len(edges)} edges, horizon is {self.T}")
            for u, v in edges:
                if u == v or not (1 <= u <= self.n and 1 <= v <= self.n):
                    raise ValueError(f"invalid edge ({u}, {v}) on vertices 1..{self.n}")
        self.edges = edges
        self.emitted_edges = []

    @staticmethod
    def parse_edge_list(text: str):
        out = []
        for line in text.splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                u, v = line.split()[:2]
                out.append((int(u), int(v)))
        return out

    def _emit(self, prefix):
        if self.edges is not None:
            u, v = self.edges[self.t]
        else:
            u = int(self.stream.integers(1, self.n + 1))
            v = int(self.stream.integers(1, self.n))
            if v >= u:
                v += 1
        self.emitted_edges.append((u, v))
        vec = np.zeros(self.n)
        vec[u - 1] = 1.0 / math.sqrt(2.0)
        vec[v - 1] = -1.0 / math.sqrt(2.0)
        return vec


KINDS = {
    "oblivious-block": ObliviousBlockAdversary,
    "adaptive-orthogonal": AdaptiveOrthogonalAdversary,
    "iid-sampler": IIDSamplerAdversary,
    "edge-stream": EdgeStreamAdversary,
}


def make_adversary(kind: str, n: int, T: int, stream: RandomStream | None = None, **params) -> Adversary:
    if kind == "fixed-sequence":
        return FixedSequenceAdversary(params.pop("vectors"), stream, **params)
    if kind not in KINDS:
        raise ValueError(f"unknown adversary kind {kind!r}")
    return KINDS[kind](n, T, stream, **params)


def play(signer, adversary: Adversary, meta=None) -> Transcript:
    """Run a started signer against an adversary for the adversary's horizon."""
    if signer.n_features_in_ != adversary.n:
        raise ValueError("signer and adversary disagree on the dimension")
    for _ in range(adversary.T - adversary.t):
        v = adversary.next(signer.prefix_ if adversary.adaptive else None)
        signer.step(v)
    return signer.transcript(meta)
