"""Replicated signer-versus-adversary experiments used by the CLI and the acceptance suite."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .adversaries import EdgeStreamAdversary, ObliviousBlockAdversary, make_adversary, play
from .core import RandomStream
from .metrics import discrepancy, growth_fit
from .signers import make_signer

SIGNER_TAG = 1
ADVERSARY_TAG = 2


def replicate_streams(master_seed: int, r: int):
    base = RandomStream(master_seed, r)
    return base.derive(SIGNER_TAG), base.derive(ADVERSARY_TAG)


def _map(fn, items, jobs):
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))
    return [fn(x) for x in items]


def _signer_params(strategy, c, T):
    if strategy != "self-balancing-walk":
        return {}
    return {"c": c} if c is not None else {"horizon": T}


def _one_run(args):
    strategy, c, kind, n, T, adv_params, master_seed, r = args
    s_stream, a_stream = replicate_streams(master_seed, r)
    signer = make_signer(strategy, n, _signer_params(strategy, c, T), s_stream)
    adversary = make_adversary(kind, n, T, a_stream, **adv_params)
    return play(signer, adversary)


def simulate(strategy, kind, n, T, replicates, master_seed, c=None, adv_params=None, jobs=1):
    """Transcripts of ``replicates`` independent runs, ordered by replicate index."""
    tasks = [(strategy, c, kind, n, T, dict(adv_params or {}), master_seed, r) for r in range(replicates)]
    return _map(_one_run, tasks, jobs)


def block_match_stats(transcript, adversary: ObliviousBlockAdversary) -> dict:
    """Count complete blocks in which the signer's signs equal the adversary's y.

    For matched blocks also report the largest deviation of the block sum's
    l2 norm from sqrt(k), and whether a block-boundary prefix reached
    sqrt(k) / (2 sqrt 2) in l_inf.
    """
    k = adversary.k
    signs = transcript.signs
    prefix = np.vstack([np.zeros((1, transcript.dimension)), transcript.prefix_sums])
    blocks = matches = 0
    norm_err = 0.0
    boundary_ok = True
    for b, (lo, hi) in enumerate(adversary.block_slices()):
        blocks += 1
        if np.array_equal(signs[lo:hi], adversary.y[b]):
            matches += 1
            block_sum = prefix[hi] - prefix[lo]
            norm_err = max(norm_err, abs(float(np.linalg.norm(block_sum)) - math.sqrt(k)))
            reach = max(np.max(np.abs(prefix[lo])), np.max(np.abs(prefix[hi])))
            boundary_ok &= bool(reach >= math.sqrt(k) / (2 * math.sqrt(2)) - 1e-12)
    return {"blocks": blocks, "matches": matches, "norm_error": norm_err, "boundary_ok": boundary_ok}


def _one_lowerbound(args):
    strategy, c, T, log_base, master_seed, r = args
    s_stream, a_stream = replicate_streams(master_seed, r)
    signer = make_signer(strategy, 2, _signer_params(strategy, c, T), s_stream)
    adversary = ObliviousBlockAdversary(2, T, a_stream, log_base=log_base)
    tr = play(signer, adversary)
    stats = block_match_stats(tr, adversary)
    stats["max_linf"] = discrepancy(tr, math.inf)["max_prefix"]
    return stats


def lowerbound_sweep(strategy, T_grid, replicates, master_seed, c=None, log_base="2", quantile=0.9, jobs=1):
    """Oblivious block adversary against one signer over a grid of horizons.

    Returns per-T rows (block-match frequency with its standard error, the
    quantile of the max prefix l_inf norm) and a sqrt(ln T) growth fit of
    that quantile.
    """
    rows = []
    for T in T_grid:
        tasks = [(strategy, c, T, log_base, master_seed, r) for r in range(replicates)]
        runs = _map(_one_lowerbound, tasks, jobs)
        k = ObliviousBlockAdversary(2, T, RandomStream(0, 0), log_base=log_base).k
        blocks = sum(x["blocks"] for x in runs)
        matches = sum(x["matches"] for x in runs)
        expected = 2.0**-k
        se = math.sqrt(expected * (1 - expected) / blocks)
        freq = matches / blocks
        stat = np.array([x["max_linf"] for x in runs])
        rows.append({
            "T": T,
            "k": k,
            "blocks": blocks,
            "matches": matches,
            "match_freq": freq,
            "expected": expected,
            "se": se,
            "match_within_3se": abs(freq - expected) <= 3 * se,
            "norm_error": max(x["norm_error"] for x in runs),
            "boundary_ok": all(x["boundary_ok"] for x in runs),
            "quantile": float(np.quantile(stat, quantile)),
            "mean": float(stat.mean()),
        })
    fit = growth_fit([(r["T"], r["quantile"]) for r in rows])
    q = [r["quantile"] for r in rows]
    fit["range"] = float(max(q) - min(q))
    return {"signer": strategy, "rows": rows, "fit": fit}


def orientation_imbalance(edges, signs, n_vertices) -> int:
    """Largest |outdegree - indegree| over all vertices and times; +1 orients u -> v."""
    bal = np.zeros(n_vertices + 1, dtype=np.int64)
    worst = 0
    for (u, v), x in zip(edges, signs):
        bal[u] += x
        bal[v] -= x
        worst = max(worst, abs(int(bal[u])), abs(int(bal[v])))
    return worst


def _one_orient(args):
    strategy, c, n_vertices, T, master_seed, r = args
    s_stream, a_stream = replicate_streams(master_seed, r)
    signer = make_signer(strategy, n_vertices, _signer_params(strategy, c, T), s_stream)
    adversary = EdgeStreamAdversary(n_vertices, T, a_stream)
    tr = play(signer, adversary)
    return orientation_imbalance(adversary.emitted_edges, tr.signs, n_vertices)


def orient_sweep(strategy, n_vertices, T_grid, replicates, master_seed, c=None, quantile=0.9, jobs=1):
    rows = []
    for T in T_grid:
        tasks = [(strategy, c, n_vertices, T, master_seed, r) for r in range(replicates)]
        stats = np.array(_map(_one_orient, tasks, jobs), dtype=np.float64)
        rows.append({"T": T, "quantile": float(np.quantile(stats, quantile)), "mean": float(stats.mean()),
                     "max": float(stats.max())})
    return rows
