import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.base import clone

from vecbal.core import RandomStream
from vecbal.nets import build_net
from vecbal.signers import (
    GreedySigner,
    HorizonExhausted,
    SelfBalancingWalkSigner,
    TreeCertifiedSigner,
    UniformRandomSigner,
    make_signer,
)
from vecbal.tree import TreeSpec, certify, search_subgaussian_distribution

NET1 = build_net(1, 0.5)
E1 = np.array([1.0, 0.0])


def two_point_certificate():
    return certify(TreeSpec.path([1.0]), [[0, 0], [1, -1]], NET1, 1.3)


def test_start_state():
    s = make_signer("uniform-random", 2, {}, RandomStream(4, 0))
    assert np.array_equal(s.prefix_, [0.0, 0.0])
    assert s.seed == 4


def test_greedy_rules():
    g = GreedySigner().start(2)
    assert g.step(E1) == 1  # tie
    assert g.step(E1) == -1
    g = GreedySigner().start(2)
    g.prefix_ = np.array([2.0, 0.0])
    assert g.step(E1) == -1


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from([-1.0, 1.0]), min_size=1, max_size=200))
def test_greedy_one_dimension_stays_bounded(vals):
    g = GreedySigner().fit(np.array(vals).reshape(-1, 1))
    assert np.max(np.abs(g.transcript().prefix_sums)) <= 1.0


def test_self_balancing_clamps_to_minus_one():
    for seed in range(200):
        s = SelfBalancingWalkSigner(c=2.0, seed=seed).start(2)
        s.prefix_ = np.array([2.0, 0.0])
        assert s.plus_probability(E1) == 0.0
        assert s.step(E1) == -1


def test_self_balancing_parameters():
    with pytest.raises(ValueError):
        make_signer("self-balancing-walk", 2, {})
    with pytest.raises(ValueError):
        SelfBalancingWalkSigner().start(2)
    with pytest.raises(ValueError):
        SelfBalancingWalkSigner(c=-1.0).start(2)
    s = make_signer("self-balancing-walk", 2, {"horizon": 100})
    assert s.c_ == pytest.approx(10 * math.sqrt(math.log(400)))


def test_unknown_strategy_and_params():
    with pytest.raises(ValueError):
        make_signer("lucky", 2)
    with pytest.raises(ValueError):
        make_signer("greedy", 2, {"c": 1.0})


def test_input_validation():
    s = UniformRandomSigner().start(2)
    with pytest.raises(ValueError):
        s.step([1.0, 1.0])
    with pytest.raises(ValueError):
        s.step([1.0])
    with pytest.raises(ValueError):
        s.step([np.nan, 0.0])
    s.step([1.0 + 1e-13, 0.0])


@pytest.mark.parametrize("strategy,params", [("uniform-random", {}), ("greedy", {}), ("self-balancing-walk", {"c": 3.0})])
def test_determinism_and_replay(strategy, params):
    X = RandomStream(9, 1).normal((300, 3))
    X /= np.maximum(1.0, np.linalg.norm(X, axis=1, keepdims=True))
    runs = []
    for _ in range(2):
        s = make_signer(strategy, 3, params, RandomStream(5, 2))
        for v in X:
            s.step(v)
        runs.append(s.transcript())
    assert np.array_equal(runs[0].signs, runs[1].signs)
    assert runs[0].replay_error() <= 1e-12
    np.testing.assert_allclose(runs[0].prefix_sums[-1], runs[0].signs @ X, rtol=1e-12, atol=1e-12)


def test_sklearn_surface():
    s = SelfBalancingWalkSigner(c=2.0, seed=3)
    c2 = clone(s)
    assert c2.get_params() == s.get_params()
    X = np.eye(2)[[0, 1, 0, 1]]
    assert s.fit_predict(X).shape == (4,)
    assert s.fit_transform(X).shape == (4, 2)
    s.partial_fit(X)
    assert len(s.signs_) == 8


def test_uniform_random_is_fair():
    s = UniformRandomSigner(seed=1).start(1)
    signs = [s.step([1.0]) for _ in range(20000)]
    assert abs(np.mean(signs)) < 0.03


# -- tree-certified -------------------------------------------------------------

def test_tree_certified_clone_frequencies_and_signs():
    cert = two_point_certificate()
    clones, signs = [], []
    for seed in range(10**4):
        s = TreeCertifiedSigner(cert, seed=seed).start(1)
        clones.append(s.clone_)
        signs.append(s.step([1.0]))
        assert signs[-1] == (1 if s.clone_ == 1 else -1)
    clones = np.array(clones)
    assert abs(np.mean(clones == 1) - 0.5) <= 0.02
    assert abs(np.mean(np.array(signs) == 1) - 0.5) <= 0.02


def test_tree_certified_horizon():
    cert = two_point_certificate()
    s = TreeCertifiedSigner(cert, clone=1).start(1)
    s.step([1.0])
    with pytest.raises(HorizonExhausted):
        s.step([1.0])
    with pytest.raises(ValueError):
        TreeCertifiedSigner(cert, horizon=2).start(1)
    with pytest.raises(ValueError):
        make_signer("tree-certified", 1, {})
    with pytest.raises(ValueError):
        TreeCertifiedSigner(cert).start(2)


def test_tree_certified_zero_vector_keeps_position():
    cert = search_subgaussian_distribution(TreeSpec.path([1.0, 1.0]), 2, 10.0, NET1)
    s = TreeCertifiedSigner(cert, clone=2).start(1)
    assert s.step([0.0]) == 1
    assert s.position_ == cert.base.root
    assert s.step([1.0]) == cert.signs[1, 1]


def test_tree_certified_replays_node_distributions():
    tree = TreeSpec.path([1.0, -1.0])
    cert = search_subgaussian_distribution(tree, 4, 10.0, NET1)
    by_clone = []
    for ell in range(1, 5):
        s = TreeCertifiedSigner(cert, clone=ell).start(1)
        for v in ([1.0], [-1.0]):
            s.step(v)
        by_clone.append(s.transcript().prefix_sums[:, 0])
    by_clone = np.array(by_clone)
    for t, node in enumerate((1, 2)):
        assert sorted(by_clone[:, t]) == sorted(cert.node_distribution(node).vectors[:, 0])
