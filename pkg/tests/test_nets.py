import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vecbal.core import RandomStream
from vecbal.nets import CoveringError, Net, SizingError, build_net, conic_decompose, net_size_bound


def _probes(n, m, seed):
    g = RandomStream(seed, 99).normal((m, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def test_one_dimensional_net():
    net = build_net(1, 0.5)
    assert len(net) == 2 and net.epsilon == 0.0
    assert sorted(net.points[:, 0]) == [-1.0, 1.0]


def test_circle_net_size_and_exact_cover():
    net = build_net(2, 0.1)
    spacing = 2 * math.asin(0.05)
    assert abs(spacing - 0.100042) < 1e-6
    assert math.ceil(2 * math.pi / spacing) == 63
    # rounded up to an even count for antipodal symmetry
    assert len(net) == 64 <= net_size_bound(2, 0.1)
    assert net.covering_radius_bound() <= net.epsilon
    _, d = net.nearest_many(_probes(2, 10**5, 1))
    assert d.max() <= net.epsilon


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.3, 0.5, 0.9])
def test_circle_nets_cover_exactly(eps):
    net = build_net(2, eps)
    assert net.covering_radius_bound() <= eps + 1e-15
    assert len(net) <= net_size_bound(2, eps)


def test_greedy_net_in_three_dimensions():
    net = build_net(3, 0.5, RandomStream(1, 0))
    assert len(net) <= 216
    _, d = net.nearest_many(_probes(3, 10**5, 2))
    assert d.max() <= 0.5


@pytest.mark.parametrize("n,eps", [(3, 0.1), (3, 0.9), (4, 0.5)])
def test_higher_dimensional_nets_have_no_wide_holes(n, eps):
    net = build_net(n, eps, RandomStream(17, 0))
    assert len(net) <= net_size_bound(n, eps)
    # separation: the holes are filled without breaking the packing
    D = np.linalg.norm(net.points[:, None] - net.points[None], axis=2)
    np.fill_diagonal(D, np.inf)
    assert D.min() >= eps * (1 - 1e-12)
    _, d = net.nearest_many(_probes(n, 10**5, 3))
    assert d.max() <= eps
    # a direction the random phase alone left 0.1028 away
    w = np.array([0.209265, 0.014922, -0.977745])
    if n == 3 and eps == 0.1:
        assert net.nearest(w / np.linalg.norm(w))[1] <= eps


def test_nets_are_symmetric_unit():
    for net in (build_net(2, 0.2), build_net(3, 0.6, RandomStream(4, 0))):
        assert np.allclose(np.linalg.norm(net.points, axis=1), 1.0, atol=1e-12)
        for p in net.points:
            assert net.contains(-p)


def test_sizing_errors():
    with pytest.raises(SizingError):
        build_net(10, 0.1, RandomStream(0, 0))
    with pytest.raises(ValueError):
        build_net(3, 0.5)  # needs a stream
    with pytest.raises(ValueError):
        build_net(2, 1.0)


def test_nearest_breaks_ties_by_lowest_index():
    net = Net.circle(4, 0.8)
    k, _ = net.nearest(np.array([1.0, 1.0]) / math.sqrt(2))
    assert k == 0


def test_csv_round_trip():
    net = build_net(3, 0.7, RandomStream(5, 0))
    back = Net.from_csv(net.to_csv(comments=["x"]))
    assert np.array_equal(back.points, net.points) and back.epsilon == net.epsilon
    with pytest.raises(ValueError):
        Net.from_csv("1.0,0.0\n")


def test_decompose_net_point_is_unit_mass():
    net = build_net(2, 0.1)
    lam = conic_decompose(net.points[5], net)
    assert lam[5] == pytest.approx(1.0, abs=1e-15) and lam.sum() == pytest.approx(1.0, abs=1e-15)


def test_decompose_midway_direction():
    net = Net.circle(64, 0.1)
    a = math.pi / 64
    w0 = np.array([math.cos(a), math.sin(a)])
    lam = conic_decompose(w0, net)
    assert np.all(lam >= 0)
    assert np.linalg.norm(lam @ net.points - w0) <= 1e-9
    assert lam.sum() <= 1 / 0.9 + 1e-9


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([0.1, 0.5]), st.integers(2, 3), st.integers(0, 2**32))
def test_decompose_postconditions(eps, n, seed):
    net = build_net(n, eps, RandomStream(17, 0))
    for w0 in _probes(n, 20, seed):
        lam = conic_decompose(w0, net, tol=1e-12)
        assert np.all(lam >= 0)
        assert np.linalg.norm(lam @ net.points - w0) <= 1e-9
        assert lam.sum() <= 1 / (1 - eps) + 1e-9


def test_decompose_reports_uncovered_direction():
    bad = Net(np.array([[1.0, 0.0], [-1.0, 0.0]]), 0.1)
    with pytest.raises(CoveringError) as err:
        conic_decompose(np.array([0.0, 1.0]), bad)
    assert err.value.distance > 0.1


def test_decompose_requires_unit_input():
    with pytest.raises(ValueError):
        conic_decompose(np.array([2.0, 0.0]), Net.circle(8))
