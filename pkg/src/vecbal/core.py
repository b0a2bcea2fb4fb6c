"""Shared numeric types, seeded randomness and run transcripts."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_probabilities, check_unit, check_vector, check_vectors

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class RandomStream:
    """Counter-based random stream keyed by ``(master_seed, stream_id)``.

    Draws come from a Philox generator whose 128-bit key is the pair, so two
    streams with the same pair replay identically and streams with different
    ids never share a key.
    """

    def __init__(self, master_seed: int = 0, stream_id: int = 0):
        for name, value in (("master_seed", master_seed), ("stream_id", stream_id)):
            if not 0 <= int(value) <= _MASK64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value}")
        self.master_seed = int(master_seed)
        self.stream_id = int(stream_id)
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        self.generator = np.random.Generator(np.random.Philox(key=key))

    def __repr__(self):
        return f"RandomStream(master_seed={self.master_seed}, stream_id={self.stream_id})"

    def derive(self, *tags: int) -> "RandomStream":
        """Fresh stream whose id is a hash of this id and ``tags``; state is not shared."""
        sid = self.stream_id
        for tag in tags:
            sid = _splitmix64(sid ^ _splitmix64(int(tag) & _MASK64))
        return RandomStream(self.master_seed, sid)

    def normal(self, size=None):
        return self.generator.standard_normal(size)

    def uniform(self, size=None):
        return self.generator.random(size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size=size)

    def signs(self, size=None):
        """Fair +-1 draws."""
        return 2 * self.generator.integers(0, 2, size=size) - 1


def standard_gaussian_sample(stream: RandomStream, n: int) -> np.ndarray:
    """One draw from N(0, I_n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return stream.normal(n)


@dataclass(frozen=True)
class FiniteScalarDistribution:
    values: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        values = check_vector(self.values, name="values")
        probs = check_probabilities(self.probabilities)
        if probs.size != values.size:
            raise ValueError("values and probabilities differ in length")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probabilities", probs)

    @classmethod
    def uniform(cls, values) -> "FiniteScalarDistribution":
        values = check_vector(values, name="values")
        return cls(values, np.full(values.size, 1.0 / values.size))

    def mean(self) -> float:
        return float(self.probabilities @ self.values)

    def moment(self, p: float) -> float:
        """E|X|^p."""
        return float(self.probabilities @ np.abs(self.values) ** p)

    def scaled(self, c: float) -> "FiniteScalarDistribution":
        return FiniteScalarDistribution(c * self.values, self.probabilities)


@dataclass(frozen=True)
class FiniteVectorDistribution:
    vectors: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        vectors = check_vectors(self.vectors, name="vectors")
        if vectors.shape[0] == 0:
            raise ValueError("a distribution needs at least one atom")
        probs = check_probabilities(self.probabilities)
        if probs.size != vectors.shape[0]:
            raise ValueError("vectors and probabilities differ in length")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "probabilities", probs)

    @classmethod
    def uniform(cls, vectors) -> "FiniteVectorDistribution":
        vectors = check_vectors(vectors, name="vectors")
        k = vectors.shape[0]
        return cls(vectors, np.full(k, 1.0 / k))

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def project(self, w) -> FiniteScalarDistribution:
        """Distribution of <X, w> for a unit direction ``w``."""
        w = check_vector(w, self.dimension, name="w")
        check_unit(w)
        return FiniteScalarDistribution(self.vectors @ w, self.probabilities)


@dataclass(frozen=True)
class Transcript:
    """Inputs, emitted signs and prefix sums of one online run."""

    inputs: np.ndarray
    signs: np.ndarray
    prefix_sums: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        inputs = check_vectors(self.inputs, name="inputs")
        signs = np.asarray(self.signs, dtype=np.int64).reshape(-1)
        prefix = check_vectors(self.prefix_sums, n=inputs.shape[1], name="prefix_sums")
        if not (inputs.shape[0] == signs.size == prefix.shape[0]):
            raise ValueError("inputs, signs and prefix_sums must have one row per step")
        if not np.all(np.abs(signs) == 1):
            raise ValueError("signs must be +-1")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "prefix_sums", prefix)

    @classmethod
    def from_signs(cls, inputs, signs, meta=None) -> "Transcript":
        inputs = check_vectors(inputs, name="inputs")
        signs = np.asarray(signs, dtype=np.int64).reshape(-1)
        return cls(inputs, signs, replay_prefix_sums(inputs, signs), meta or {})

    @property
    def horizon(self) -> int:
        return self.inputs.shape[0]

    @property
    def dimension(self) -> int:
        return self.inputs.shape[1]

    def replay_error(self) -> float:
        """Largest relative deviation between stored and recomputed prefix sums."""
        if self.horizon == 0:
            return 0.0
        replay = replay_prefix_sums(self.inputs, self.signs)
        scale = np.maximum(1.0, np.abs(replay))
        return float(np.max(np.abs(replay - self.prefix_sums) / scale))

    def to_csv(self, fh=None, comments=()) -> str | None:
        """Write ``step, v_1..v_n, sign, s_1..s_n``; returns text when ``fh`` is None."""
        own = fh is None
        if own:
            fh = io.StringIO()
        for line in comments:
            fh.write(f"# {line}\n")
        n = self.dimension
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["step"] + [f"v_{j + 1}" for j in range(n)] + ["sign"] + [f"s_{j + 1}" for j in range(n)]
        )
        for t in range(self.horizon):
            writer.writerow(
                [t + 1]
                + [repr(float(x)) for x in self.inputs[t]]
                + [int(self.signs[t])]
                + [repr(float(x)) for x in self.prefix_sums[t]]
            )
        return fh.getvalue() if own else None

    @classmethod
    def from_csv(cls, source) -> "Transcript":
        text = source.read() if hasattr(source, "read") else str(source)
        rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
        if not rows:
            raise ValueError("empty transcript CSV")
        header, body = rows[0], rows[1:]
        n = sum(1 for h in header if h.startswith("v_"))
        if header != ["step"] + [f"v_{j + 1}" for j in range(n)] + ["sign"] + [f"s_{j + 1}" for j in range(n)]:
            raise ValueError(f"unexpected transcript header {header}")
        data = np.array([[float(x) for x in r] for r in body], dtype=np.float64).reshape(len(body), 2 * n + 2)
        return cls(data[:, 1 : n + 1], data[:, n + 1].astype(np.int64), data[:, n + 2 :])


def replay_prefix_sums(inputs, signs) -> np.ndarray:
    inputs = np.asarray(inputs, dtype=np.float64)
    signs = np.asarray(signs, dtype=np.float64).reshape(-1, 1)
    return np.cumsum(signs * inputs, axis=0)
