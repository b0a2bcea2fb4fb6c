import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vecbal.adversaries import AdaptiveOrthogonalAdversary, FixedSequenceAdversary, play
from vecbal.core import RandomStream, Transcript
from vecbal.metrics import DiscrepancyReport, discrepancy, empirical_direction_psi2, growth_fit
from vecbal.nets import build_net
from vecbal.signers import TreeCertifiedSigner, UniformRandomSigner, make_signer
from vecbal.tree import TreeSpec, search_subgaussian_distribution

TWO_POINT = 1.0 / math.sqrt(math.log(2.0))


def _e1_transcript(signs):
    return Transcript.from_signs(np.tile([1.0, 0.0], (len(signs), 1)), signs)


def test_discrepancy_examples():
    assert discrepancy(_e1_transcript([1, 1, 1]), math.inf) == {"max_prefix": 3.0, "final": 3.0}
    assert discrepancy(_e1_transcript([1, -1, 1, -1]), 2) == {"max_prefix": 1.0, "final": 0.0}
    tr = play(UniformRandomSigner().start(2), AdaptiveOrthogonalAdversary(2, 9))
    assert abs(discrepancy(tr, 2)["final"] - 3.0) <= 1e-12
    with pytest.raises(ValueError):
        discrepancy(tr, 0.5)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(1, 40), st.integers(0, 2**32))
def test_norm_ordering_and_zero_padding(n, T, seed):
    rs = RandomStream(seed, 0)
    X = rs.uniform((T, n)) * 2 - 1
    tr = Transcript.from_signs(X, rs.signs(T))
    vals = [discrepancy(tr, p)["max_prefix"] for p in (1, 1.5, 2, 3, math.inf)]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    for p in (1, 2, math.inf):
        d = discrepancy(tr, p)
        assert d["max_prefix"] >= d["final"] >= 0
    padded = Transcript.from_signs(np.vstack([X, np.zeros((1, n))]), np.append(tr.signs, -1))
    for p in (1, 2, math.inf):
        assert discrepancy(padded, p) == discrepancy(tr, p)


def test_growth_fit_examples():
    Ts = [64, 256, 1024, 4096]
    fit = growth_fit([(T, 2 * math.sqrt(math.log(T))) for T in Ts])
    assert abs(fit["slope"] - 2) <= 1e-9 and fit["residual"] <= 1e-9
    flat = growth_fit([(T, 5.0) for T in Ts])
    assert abs(flat["slope"]) <= 1e-9
    with pytest.raises(ValueError):
        growth_fit([(64, 1.0), (64, 2.0), (64, 3.0)])
    with pytest.raises(ValueError):
        growth_fit([(64, 1.0), (128, 2.0)])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 100), min_size=4, max_size=4), st.floats(0.01, 100))
def test_growth_fit_scale_equivariance(ys, c):
    Ts = [16, 64, 256, 1024]
    a = growth_fit(list(zip(Ts, ys)))
    b = growth_fit([(T, c * y) for T, y in zip(Ts, ys)])
    assert abs(b["slope"] - c * a["slope"]) <= 1e-9 * max(1, abs(c * a["slope"]))
    assert abs(b["residual"] - c * a["residual"]) <= 1e-9 * max(1, c * a["residual"])


def test_empirical_direction_point_mass_and_two_point():
    trs = [_e1_transcript([1] * 5) for _ in range(100)]
    assert abs(empirical_direction_psi2(trs, 5, [1.0, 0.0]) - 5 * TWO_POINT) <= 1e-9
    X = np.tile([1.0, 0.0], (3, 1))
    trs = [play(make_signer("uniform-random", 2, {}, RandomStream(s, 0)), FixedSequenceAdversary(X))
           for s in range(200)]
    assert abs(empirical_direction_psi2(trs, 1, [1.0, 0.0]) - TWO_POINT) <= 1e-9


def test_empirical_direction_tree_certified_matches_certificate():
    net = build_net(1, 0.5)
    tree = TreeSpec.path([1.0, 1.0])
    cert = search_subgaussian_distribution(tree, 4, 10.0, net)
    X = np.array([[1.0], [1.0]])
    trs = []
    for seed in range(10**4):
        s = TreeCertifiedSigner(cert, seed=seed).start(1)
        trs.append(play(s, FixedSequenceAdversary(X)))
    for t, node in ((1, 1), (2, 2)):
        est = empirical_direction_psi2(trs, t, [1.0])
        assert abs(est / cert.brackets[node].upper - 1) <= 0.10


def test_empirical_direction_errors():
    with pytest.raises(ValueError):
        empirical_direction_psi2([_e1_transcript([1])] * 10, 1, [1.0, 0.0])
    trs = [_e1_transcript([1, 1])] * 99 + [Transcript.from_signs([[0.0, 1.0], [1.0, 0.0]], [1, 1])]
    with pytest.raises(ValueError):
        empirical_direction_psi2(trs, 1, [1.0, 0.0])


def test_report_summary_and_serialisation():
    trs = [_e1_transcript(s) for s in ([1, 1, -1], [1, -1, 1], [-1, -1, -1])]
    rep = DiscrepancyReport.from_transcripts(trs, ["a", "b", "c"], ps=(2.0, math.inf))
    assert list(rep.max_linf) == [2.0, 1.0, 3.0]
    summ = rep.summary()
    assert summ["max_prefix_linf"]["median"] == 2.0
    assert set(summ) == {"max_prefix_linf", "max_prefix_l2", "final_l2", "final_linf"}
    text = rep.to_csv(["cfg"])
    assert text.startswith("# cfg\nreplicate,seed,max_prefix_linf,max_prefix_l2,final_l2,final_linf\n")
    doc = json.loads(rep.to_json({"version": "x"}))
    assert doc["version"] == "x" and doc["replicates"] == 3
