"""Discrepancy statistics over transcripts and replicated runs."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import Transcript
from .psi2 import psi2_empirical


def _norms(rows, p):
    if p == math.inf or p == "inf":
        return np.max(np.abs(rows), axis=1) if rows.size else np.zeros(0)
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return np.sum(np.abs(rows) ** p, axis=1) ** (1.0 / p)


def discrepancy(transcript: Transcript, p=2) -> dict:
    """Largest and final l_p norm of the stored prefix sums (p may be inf)."""
    p = math.inf if p in ("inf", math.inf) else float(p)
    norms = _norms(transcript.prefix_sums, p)
    if norms.size == 0:
        return {"max_prefix": 0.0, "final": 0.0}
    return {"max_prefix": float(norms.max()), "final": float(norms[-1])}


def growth_fit(points, model="sqrt-log") -> dict:
    """Least squares fit of ``statistic = slope * sqrt(ln T) + intercept``.

    ``points`` is a sequence of ``(T, statistic)``. Returns slope, intercept
    and the RMS residual.
    """
    if model != "sqrt-log":
        raise ValueError(f"unsupported model {model!r}")
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise ValueError("growth_fit needs at least 3 (T, statistic) points")
    T, y = pts[:, 0], pts[:, 1]
    if np.any(T < 4):
        raise ValueError("T values must be >= 4")
    if np.unique(T).size < 2:
        raise ValueError("degenerate design: all T equal")
    x = np.sqrt(np.log(T))
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return {
        "slope": float(coef[0]),
        "intercept": float(coef[1]),
        "residual": float(math.sqrt(np.mean(resid**2))),
    }


def empirical_direction_psi2(transcripts, t: int, w) -> float:
    """Plug-in psi_2 of <prefix_t, w> across replicate runs on one input sequence."""
    transcripts = list(transcripts)
    if len(transcripts) < 100:
        raise ValueError("need at least 100 replicates")
    ref = transcripts[0].inputs
    for tr in transcripts[1:]:
        if tr.inputs.shape != ref.shape or not np.array_equal(tr.inputs, ref):
            raise ValueError("replicates do not share the input sequence")
    if not 1 <= t <= ref.shape[0]:
        raise ValueError(f"step t must lie in 1..{ref.shape[0]}")
    w = np.asarray(w, dtype=np.float64)
    samples = np.array([tr.prefix_sums[t - 1] @ w for tr in transcripts])
    return psi2_empirical(samples)


@dataclass
class DiscrepancyReport:
    """Per-replicate discrepancy values and their summaries."""

    seeds: list
    max_linf: np.ndarray
    max_l2: np.ndarray
    final_lp: dict
    quantile: float = 0.9
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_transcripts(cls, transcripts, seeds, ps=(2.0,), quantile=0.9) -> "DiscrepancyReport":
        max_linf, max_l2 = [], []
        final = {p: [] for p in ps}
        for tr in transcripts:
            max_linf.append(discrepancy(tr, math.inf)["max_prefix"])
            max_l2.append(discrepancy(tr, 2)["max_prefix"])
            for p in ps:
                final[p].append(discrepancy(tr, p)["final"])
        return cls(list(seeds), np.array(max_linf), np.array(max_l2),
                   {p: np.array(v) for p, v in final.items()}, quantile)

    @property
    def replicates(self) -> int:
        return len(self.seeds)

    def _columns(self):
        cols = {"max_prefix_linf": self.max_linf, "max_prefix_l2": self.max_l2}
        for p, v in self.final_lp.items():
            cols[f"final_l{_fmt_p(p)}"] = v
        return cols

    def summary(self) -> dict:
        out = {}
        for name, v in self._columns().items():
            out[name] = {
                "mean": float(np.mean(v)),
                "median": float(np.median(v)),
                f"q{self.quantile:g}": float(np.quantile(v, self.quantile)),
            }
        return out

    def to_csv(self, comments=()) -> str:
        fh = io.StringIO()
        for line in comments:
            fh.write(f"# {line}\n")
        cols = self._columns()
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["replicate", "seed"] + list(cols))
        for r in range(self.replicates):
            writer.writerow([r, self.seeds[r]] + [repr(float(v[r])) for v in cols.values()])
        return fh.getvalue()

    def to_json(self, header=None) -> str:
        body = dict(header or {})
        body.update({"replicates": self.replicates, "seeds": self.seeds, "summary": self.summary()})
        body.update(self.extra)
        return json.dumps(body, indent=2, sort_keys=True) + "\n"


def _fmt_p(p):
    return "inf" if p == math.inf else f"{p:g}"
