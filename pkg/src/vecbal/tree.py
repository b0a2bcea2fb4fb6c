"""Balancing signs on vector-labelled rooted trees.

Three pieces live here: the bottom-up interval recursion that balances every
root path of a 1-D tree into a stretched copy of a target interval, the
cloning blow-up that turns one sign vector on a bigger tree into a uniform
distribution over sign vectors on the original tree, and an exhaustive search
that certifies such a distribution with exact psi_2 brackets.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import NORM_SLACK, check_positive_int, check_vector
from .core import FiniteVectorDistribution, RandomStream
from .gauss1d import (
    DEFAULT_BETA,
    Interval,
    beta_is_admissible,
    gaussian_measure,
    star_1d,
    symmetric_interval_for_measure,
)
from .nets import Net, SizingError, build_net
from .psi2 import DEFAULT_TOL, Psi2Bracket, psi2_batch

DEFAULT_SEARCH_CAP = 2**24
MAX_CLONED_EDGES = 10**6


class InvariantBreach(RuntimeError):
    """A step that the construction guarantees to succeed has failed."""


@dataclass(frozen=True, eq=False)
class TreeSpec:
    """Rooted tree whose non-root nodes carry the vector of their parent edge.

    Nodes are ``0..|V|-1``; ``parents[root] == -1``. Edge ``e`` is identified
    with its child node, so ``vectors[c]`` labels the edge ``parents[c] -> c``
    and ``vectors[root]`` is zero.
    """

    parents: np.ndarray
    vectors: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        parents = np.asarray(self.parents, dtype=np.int64).reshape(-1)
        vectors = np.asarray(self.vectors, dtype=np.float64)
        if vectors.ndim == 1:
            vectors = vectors.reshape(-1, 1)
        V = parents.size
        if vectors.shape[0] != V:
            raise ValueError("need one vector row per node")
        roots = np.flatnonzero(parents < 0)
        if roots.size != 1:
            raise ValueError(f"tree must have exactly one root, found {roots.size}")
        if V < 2:
            raise ValueError("tree needs at least one edge")
        if np.any(parents >= V):
            raise ValueError("parent index out of range")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("edge vectors must be finite")
        root = int(roots[0])
        vectors = vectors.copy()
        vectors[root] = 0.0
        norms = np.linalg.norm(vectors, axis=1)
        if np.any(norms > 1.0 + NORM_SLACK):
            bad = int(np.argmax(norms))
            raise ValueError(f"edge into node {bad} has norm {norms[bad]:.15g} > 1")
        children = [[] for _ in range(V)]
        for c in range(V):
            if c != root:
                children[int(parents[c])].append(c)
        # every node must be reachable from the root (rules out cycles)
        seen, stack = 0, [root]
        while stack:
            node = stack.pop()
            seen += 1
            stack.extend(children[node])
        if seen != V:
            raise ValueError("parent array does not describe a connected acyclic tree")
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(V))
        if len(labels) != V:
            raise ValueError("need one label per node")
        object.__setattr__(self, "parents", parents)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_root", root)
        object.__setattr__(self, "_children", tuple(tuple(ch) for ch in children))

    @classmethod
    def from_edges(cls, edges, n: int | None = None, root=None) -> "TreeSpec":
        """Build from ``(parent_label, child_label, vector)`` triples."""
        edges = list(edges)
        if not edges:
            raise ValueError("tree needs at least one edge")
        labels = []
        index = {}
        for p, c, _ in edges:
            for lab in (p, c):
                if lab not in index:
                    index[lab] = len(labels)
                    labels.append(lab)
        V = len(labels)
        if len(edges) != V - 1:
            raise ValueError(f"a tree on {V} nodes has {V - 1} edges, got {len(edges)}")
        dim = n if n is not None else check_vector(edges[0][2]).size
        parents = np.full(V, -1, dtype=np.int64)
        vectors = np.zeros((V, dim))
        for p, c, v in edges:
            ci = index[c]
            if parents[ci] >= 0:
                raise ValueError(f"node {c!r} has two parents")
            parents[ci] = index[p]
            vectors[ci] = check_vector(v, dim, name=f"vector of edge {p}->{c}")
        tree = cls(parents, vectors, tuple(str(lab) for lab in labels))
        if root is not None and tree.labels[tree.root] != str(root):
            raise ValueError(f"root is {tree.labels[tree.root]!r}, expected {root!r}")
        return tree

    @classmethod
    def path(cls, vectors) -> "TreeSpec":
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim == 1:
            vectors = vectors.reshape(-1, 1)
        T = vectors.shape[0]
        parents = np.arange(-1, T)
        return cls(parents, np.vstack([np.zeros((1, vectors.shape[1])), vectors]))

    @property
    def root(self) -> int:
        return self._root

    @property
    def n_nodes(self) -> int:
        return self.parents.size

    @property
    def n_edges(self) -> int:
        return self.parents.size - 1

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def children(self, i: int) -> tuple:
        return self._children[i]

    def canonical_order(self) -> list[int]:
        """Preorder of nodes, children sorted by a relabelling-invariant key."""
        codes = self._subtree_codes()

        def key(c):
            return (tuple(self.vectors[c]), codes[c])

        order, stack = [], [self.root]
        while stack:
            node = stack.pop()
            order.append(node)
            stack.extend(sorted(self._children[node], key=key, reverse=True))
        return order

    def canonical_edges(self) -> list[int]:
        """Child nodes of all edges, parents before children."""
        return [i for i in self.canonical_order() if i != self.root]

    def _subtree_codes(self):
        codes = [None] * self.n_nodes
        for node in reversed(self._bfs()):
            parts = sorted(
                repr(tuple(self.vectors[c])) + codes[c] for c in self._children[node]
            )
            codes[node] = "(" + ",".join(parts) + ")"
        return codes

    def _bfs(self):
        order = [self.root]
        for node in order:
            order.extend(self._children[node])
        return order

    def descendant_counts(self) -> np.ndarray:
        """|D_i|: size of the subtree rooted at each node, node itself included."""
        counts = np.ones(self.n_nodes, dtype=np.int64)
        for node in reversed(self._bfs()):
            if node != self.root:
                counts[self.parents[node]] += counts[node]
        return counts

    def depths(self) -> np.ndarray:
        d = np.zeros(self.n_nodes, dtype=np.int64)
        for node in self._bfs():
            if node != self.root:
                d[node] = d[self.parents[node]] + 1
        return d

    def root_path(self, i: int) -> list[int]:
        """Edges (child nodes) from the root down to ``i``."""
        path = []
        while i != self.root:
            path.append(i)
            i = int(self.parents[i])
        return path[::-1]

    def path_sums(self, signs) -> np.ndarray:
        """sum_{e in P_i} x_e v_e for every node; ``signs`` is indexed by child node."""
        signs = np.asarray(signs, dtype=np.float64)
        sums = np.zeros_like(self.vectors)
        for node in self._bfs():
            if node != self.root:
                sums[node] = sums[self.parents[node]] + signs[node] * self.vectors[node]
        return sums

    def to_text(self) -> str:
        lines = [f"{self.dimension} {self.n_nodes} {self.n_edges}"]
        for c in self._bfs():
            if c == self.root:
                continue
            coords = " ".join(repr(float(x)) for x in self.vectors[c])
            lines.append(f"{self.labels[self.parents[c]]} {self.labels[c]} {coords}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TreeSpec":
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not rows:
            raise ValueError("empty tree file")
        n, V, E = (int(x) for x in rows[0])
        body = rows[1:]
        if len(body) != E or E != V - 1:
            raise ValueError(f"header promises {E} edges on {V} nodes, file has {len(body)}")
        edges = []
        for r in body:
            if len(r) != n + 2:
                raise ValueError(f"edge line {' '.join(r)!r} should have {n + 2} fields")
            edges.append((r[0], r[1], [float(x) for x in r[2:]]))
        return cls.from_edges(edges, n)


def random_tree(n_edges: int, stream: RandomStream, n: int = 1, max_children: int | None = 2) -> TreeSpec:
    """Random recursive tree; each new node hangs off a uniformly chosen open node.

    Edge vectors are uniform in [-1, 1] for n = 1 and uniform in the unit ball
    otherwise.
    """
    n_edges = check_positive_int(n_edges, "n_edges")
    parents = [-1]
    child_count = [0]
    open_nodes = [0]
    for c in range(1, n_edges + 1):
        p = open_nodes[int(stream.integers(0, len(open_nodes)))]
        parents.append(p)
        child_count.append(0)
        child_count[p] += 1
        if max_children is not None and child_count[p] >= max_children:
            open_nodes.remove(p)
        open_nodes.append(c)
    if n == 1:
        vecs = stream.uniform(n_edges) * 2.0 - 1.0
        vectors = np.concatenate([[0.0], vecs]).reshape(-1, 1)
    else:
        g = stream.normal((n_edges, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        g *= stream.uniform((n_edges, 1)) ** (1.0 / n)
        vectors = np.vstack([np.zeros((1, n)), g])
    return TreeSpec(np.array(parents), vectors)


def net_tree(net: Net, depth: int) -> TreeSpec:
    """Complete tree of the given depth; every inner node has one child per net point."""
    depth = check_positive_int(depth, "depth")
    W = len(net)
    total = sum(W**d for d in range(depth + 1))
    if total - 1 > MAX_CLONED_EDGES:
        raise SizingError(f"net tree would have {total - 1} edges")
    parents = [-1]
    vectors = [np.zeros(net.dimension)]
    frontier = [0]
    for _ in range(depth):
        nxt = []
        for p in frontier:
            for w in net.points:
                parents.append(p)
                vectors.append(w)
                nxt.append(len(parents) - 1)
        frontier = nxt
    return TreeSpec(np.array(parents), np.array(vectors))


# ---------------------------------------------------------------------------
# 1-D recursion


@dataclass(frozen=True)
class BalanceResult:
    signs: np.ndarray
    bodies: tuple
    prefix_sums: np.ndarray
    claim1_slack: float
    claim2_slack: float
    beta: float
    target: Interval

    @property
    def claim1(self) -> bool:
        return self.claim1_slack >= -1e-9

    @property
    def claim2(self) -> bool:
        return self.claim2_slack >= -1e-12


def balance_tree_1d(tree: TreeSpec, beta: float = DEFAULT_BETA, K: Interval | None = None) -> BalanceResult:
    """Signs for a 1-D tree keeping every root path sum inside (1/beta) K.

    Bodies are built leaves-first: a leaf gets K, an inner node gets K
    intersected with the star bodies K_j * (beta v_ij) of its children.
    Signs are then fixed root-first so that beta times each path sum stays in
    the body of its endpoint; the star body containment guarantees one of the
    two signs works.
    """
    if tree.dimension != 1:
        raise ValueError("balance_tree_1d works in dimension 1 only")
    E = tree.n_edges
    if K is None:
        K = symmetric_interval_for_measure(1.0 - 1.0 / (2 * E))
    if not beta_is_admissible(beta):
        raise ValueError(f"beta={beta} fails the Gaussian mass condition for the star body")
    if not K.is_symmetric():
        raise ValueError("target interval must be symmetric about 0")
    if gaussian_measure(K) < 1.0 - 1.0 / (2 * E) - 1e-12:
        raise ValueError(f"target interval has Gaussian mass {gaussian_measure(K):.12g} < 1 - 1/(2|E|)")

    v = tree.vectors[:, 0]
    bodies = [None] * tree.n_nodes
    for node in reversed(tree._bfs()):
        body = K
        for c in tree.children(node):
            body = body.intersect(star_1d(bodies[c], beta * v[c]))
        bodies[node] = body

    counts = tree.descendant_counts()
    claim1_slack = min(gaussian_measure(bodies[i]) - (1.0 - counts[i] / (2.0 * E)) for i in range(tree.n_nodes))

    signs = np.zeros(tree.n_nodes, dtype=np.int64)
    pos = np.zeros(tree.n_nodes)  # beta * path sum
    if not bodies[tree.root].contains(0.0, 1e-12):
        raise InvariantBreach("root body does not contain the origin")
    for node in tree._bfs():
        a = pos[node]
        for c in tree.children(node):
            step = beta * v[c]
            prefer = -1 if a * step > 0 else 1
            for x in (prefer, -prefer):
                if bodies[c].contains(a + x * step, 1e-12):
                    signs[c] = x
                    pos[c] = a + x * step
                    break
            else:
                raise InvariantBreach(f"no sign keeps node {tree.labels[c]} inside its body")

    prefix = pos / beta
    claim2_slack = min(
        min(bodies[i].hi - pos[i], pos[i] - bodies[i].lo) for i in range(tree.n_nodes)
    )
    return BalanceResult(signs, tuple(bodies), prefix, claim1_slack, claim2_slack, beta, K)


class TreeBalancer1D(BaseEstimator):
    """Estimator wrapper around :func:`balance_tree_1d`.

    Parameters
    ----------
    beta : float
        Step scale of the star bodies; must satisfy the Gaussian mass
        condition (0.2001 does).
    measure : float or None
        Gaussian mass of the symmetric target interval. None uses the
        smallest admissible mass, 1 - 1/(2|E|).
    """

    def __init__(self, beta=DEFAULT_BETA, measure=None):
        self.beta = beta
        self.measure = measure

    def fit(self, tree: TreeSpec, y=None):
        K = None if self.measure is None else symmetric_interval_for_measure(self.measure)
        result = balance_tree_1d(tree, self.beta, K)
        self.result_ = result
        self.signs_ = result.signs
        self.bodies_ = result.bodies
        self.prefix_sums_ = result.prefix_sums
        return self

    def predict(self, tree: TreeSpec):
        """Signs indexed by child node (root entry is 0)."""
        return self.fit(tree).signs_


# ---------------------------------------------------------------------------
# cloning


@dataclass(frozen=True, eq=False)
class ClonedTree:
    """Base tree with every edge replaced by a path of ``n_clones`` block copies.

    ``edge_origin[c] = (base_child, l)`` says the blown-up edge into node ``c``
    is clone ``l`` (1-based) of the base edge into ``base_child``.
    """

    base: TreeSpec
    n_clones: int
    tree: TreeSpec
    edge_origin: dict


def clone_tree(tree: TreeSpec, N: int, max_edges: int = MAX_CLONED_EDGES) -> ClonedTree:
    N = check_positive_int(N, "N")
    if N * tree.n_edges > max_edges:
        raise SizingError(f"cloned tree would have {N * tree.n_edges} edges (cap {max_edges})")
    n = tree.dimension
    parents = [-1]
    vectors = [np.zeros(N * n)]
    labels = [tree.labels[tree.root]]
    origin = {}
    image = {tree.root: 0}
    for c in tree._bfs():
        if c == tree.root:
            continue
        prev = image[int(tree.parents[c])]
        for ell in range(1, N + 1):
            vec = np.zeros(N * n)
            vec[(ell - 1) * n : ell * n] = tree.vectors[c]
            parents.append(prev)
            vectors.append(vec)
            labels.append(tree.labels[c] if ell == N else f"{tree.labels[c]}#{ell}")
            prev = len(parents) - 1
            origin[prev] = (c, ell)
        image[c] = prev
    big = TreeSpec(np.array(parents), np.array(vectors), tuple(labels))
    return ClonedTree(tree, N, big, origin)


# ---------------------------------------------------------------------------
# certified search


@dataclass(frozen=True, eq=False)
class CertifiedDistribution:
    """Uniform distribution over ``n_clones`` sign vectors of ``base``.

    ``signs[c, l-1]`` is the sign of clone ``l`` of the edge into node ``c``
    (row ``root`` is zero). ``brackets[i]`` bounds the psi_2,inf norm of the
    path sum to node ``i`` when ``l`` is uniform.
    """

    base: TreeSpec
    n_clones: int
    signs: np.ndarray
    brackets: tuple
    threshold: float
    net: Net
    certified: bool = True
    explored: int = 0

    def __post_init__(self):
        worst = self.worst_upper
        if self.certified and worst > self.threshold:
            raise ValueError(f"certificate upper {worst} exceeds threshold {self.threshold}")

    @property
    def worst_upper(self) -> float:
        return max(b.upper for i, b in enumerate(self.brackets) if i != self.base.root)

    def node_distribution(self, i: int) -> FiniteVectorDistribution:
        """Block prefix sums at node ``i``, one atom per clone index."""
        path = self.base.root_path(i)
        sums = np.zeros((self.n_clones, self.base.dimension))
        for e in path:
            sums += self.signs[e][:, None] * self.base.vectors[e][None, :]
        return FiniteVectorDistribution.uniform(sums)

    def clone_signs(self, ell: int) -> np.ndarray:
        """Sign vector of the base tree selected by clone index ``ell`` (1-based)."""
        if not 1 <= ell <= self.n_clones:
            raise ValueError(f"clone index must lie in 1..{self.n_clones}")
        return self.signs[:, ell - 1].copy()

    def sample_clone(self, stream: RandomStream) -> int:
        return int(stream.integers(1, self.n_clones + 1))

    def to_csv(self, comments=()) -> str:
        fh = io.StringIO()
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write(f"# n_clones={self.n_clones}\n# threshold={self.threshold!r}\n")
        fh.write(f"# certified={str(self.certified).lower()}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["clone", "edge_parent", "edge_child", "sign"])
        labels = self.base.labels
        edges = self.base.canonical_edges()
        for ell in range(1, self.n_clones + 1):
            for c in edges:
                writer.writerow([ell, labels[self.base.parents[c]], labels[c], int(self.signs[c, ell - 1])])
        fh.write("\n")
        writer.writerow(["node", "lower", "upper", "net_epsilon"])
        for i in self.base.canonical_order():
            b = self.brackets[i]
            writer.writerow([labels[i], repr(b.lower), repr(b.upper), repr(b.net_epsilon)])
        return fh.getvalue()

    @classmethod
    def from_csv(cls, text: str, base: TreeSpec, net: Net) -> "CertifiedDistribution":
        meta = {}
        blocks, current = [], []
        for line in text.splitlines():
            if line.startswith("#"):
                if "=" in line:
                    k, v = line[1:].strip().split("=", 1)
                    meta[k] = v
                continue
            if not line.strip():
                if current:
                    blocks.append(current)
                    current = []
                continue
            current.append(next(csv.reader([line])))
        if current:
            blocks.append(current)
        if len(blocks) != 2:
            raise ValueError("certificate CSV needs a sign block and a bracket block")
        N = int(meta["n_clones"])
        index = {lab: i for i, lab in enumerate(base.labels)}
        signs = np.zeros((base.n_nodes, N), dtype=np.int64)
        for ell, _p, c, s in blocks[0][1:]:
            signs[index[c], int(ell) - 1] = int(s)
        brackets = [None] * base.n_nodes
        for node, lo, up, eps in blocks[1][1:]:
            brackets[index[node]] = Psi2Bracket(float(lo), float(up), float(eps))
        return cls(base, N, signs, tuple(brackets), float(meta["threshold"]), net,
                   meta.get("certified", "true") == "true")


def _node_bracket(blocks, net, tol, cache):
    """Bracket of the uniform distribution on the rows of ``blocks`` (N, n)."""
    order = np.lexsort(blocks.T[::-1])
    key = blocks[order].tobytes()
    hit = cache.get(key)
    if hit is None:
        N = blocks.shape[0]
        lower = float(np.max(psi2_batch(net.points @ blocks.T, np.full(N, 1.0 / N), tol)))
        hit = Psi2Bracket(lower, lower / (1.0 - net.epsilon), net.epsilon)
        cache[key] = hit
    return hit


def certify(tree: TreeSpec, signs, net: Net, threshold: float, tol: float = DEFAULT_TOL) -> CertifiedDistribution:
    """Compute node brackets for a given clone sign table ``signs`` (|V|, N).

    The result is marked certified when every node upper bound is at most
    ``threshold``.
    """
    signs = np.asarray(signs, dtype=np.int64)
    if signs.ndim != 2 or signs.shape[0] != tree.n_nodes:
        raise ValueError("signs must have shape (n_nodes, N)")
    nonroot = np.arange(tree.n_nodes) != tree.root
    if not np.all(np.abs(signs[nonroot]) == 1):
        raise ValueError("every edge clone needs a +-1 sign")
    if net.dimension != tree.dimension:
        raise ValueError(f"net dimension {net.dimension} != tree dimension {tree.dimension}")
    N = signs.shape[1]
    cache: dict = {}
    sums = np.zeros((tree.n_nodes, N, tree.dimension))
    brackets = [None] * tree.n_nodes
    brackets[tree.root] = Psi2Bracket(0.0, 0.0, net.epsilon)
    for c in tree._bfs():
        if c == tree.root:
            continue
        sums[c] = sums[tree.parents[c]] + signs[c][:, None] * tree.vectors[c][None, :]
        brackets[c] = _node_bracket(sums[c], net, tol, cache)
    worst = max(b.upper for i, b in enumerate(brackets) if i != tree.root)
    return CertifiedDistribution(tree, N, signs, tuple(brackets), threshold, net, worst <= threshold)


def search_subgaussian_distribution(
    tree: TreeSpec,
    N: int,
    threshold: float,
    net: Net | None = None,
    cap: int = DEFAULT_SEARCH_CAP,
    tol: float = DEFAULT_TOL,
) -> CertifiedDistribution:
    """Exhaustive search for a certified subgaussian sign distribution.

    Sign assignments of the cloned tree are visited in lexicographic order
    (-1 before +1), edges taken in the canonical order of the base tree and
    clones 1..N within an edge. The first assignment whose every node bracket
    has ``upper <= threshold`` is returned as a certified distribution.
    Subtrees of the enumeration are skipped once some node already fails,
    which never skips a certifying assignment. If none exists, a second pass
    finds the assignment with the smallest worst node upper bound (again the
    lexicographically first on ties) and returns it with ``certified=False``.
    """
    N = check_positive_int(N, "N")
    if net is None:
        net = build_net(tree.dimension, 0.5, RandomStream(0, 0))
    if net.dimension != tree.dimension:
        raise ValueError(f"net dimension {net.dimension} != tree dimension {tree.dimension}")
    bits = N * tree.n_edges
    if bits > 62 or 2**bits > cap:
        raise SizingError(f"search space 2^{bits} exceeds cap {cap}")

    edges = tree.canonical_edges()
    patterns = [np.array(p, dtype=np.int64) for p in itertools.product((-1, 1), repeat=N)]
    cache: dict = {}
    n = tree.dimension
    sums = np.zeros((tree.n_nodes, N, n))
    signs = np.zeros((tree.n_nodes, N), dtype=np.int64)
    brackets: list = [None] * tree.n_nodes
    brackets[tree.root] = Psi2Bracket(0.0, 0.0, net.epsilon)
    explored = 0

    def descend(k, bound, worst_so_far, first_hit):
        # best (worst_upper, signs, brackets) below this point with worst_upper <= bound
        nonlocal explored
        if k == len(edges):
            explored += 1
            return worst_so_far, signs.copy(), list(brackets)
        c = edges[k]
        p = int(tree.parents[c])
        best = (math.inf, None, None)
        for pat in patterns:
            sums[c] = sums[p] + pat[:, None] * tree.vectors[c][None, :]
            br = _node_bracket(sums[c], net, tol, cache)
            worst = max(worst_so_far, br.upper)
            if worst > bound:
                continue
            signs[c] = pat
            brackets[c] = br
            found = descend(k + 1, bound, worst, first_hit)
            if found[1] is not None and found[0] < best[0]:
                best = found
                if first_hit:
                    return best
                # ties keep the earlier assignment
                bound = math.nextafter(best[0], -math.inf)
        return best

    worst, s, b = descend(0, threshold, 0.0, True)
    if s is not None:
        return CertifiedDistribution(tree, N, s, tuple(b), threshold, net, True, explored)
    worst, s, b = descend(0, math.inf, 0.0, False)
    return CertifiedDistribution(tree, N, s, tuple(b), threshold, net, False, explored)


class SubgaussianSignSearch(BaseEstimator):
    """Estimator wrapper around :func:`search_subgaussian_distribution`.

    ``fit(tree)`` sets ``result_`` and ``certified_``. When no net is passed to
    ``fit`` one is built with ``net_epsilon`` and ``seed``.
    """

    def __init__(self, n_clones=1, threshold=10.0, net_epsilon=0.5, cap=DEFAULT_SEARCH_CAP, seed=0, tol=DEFAULT_TOL):
        self.n_clones = n_clones
        self.threshold = threshold
        self.net_epsilon = net_epsilon
        self.cap = cap
        self.seed = seed
        self.tol = tol

    def fit(self, tree: TreeSpec, y=None, net: Net | None = None):
        if net is None:
            net = build_net(tree.dimension, self.net_epsilon, RandomStream(self.seed, 0))
        self.net_ = net
        self.result_ = search_subgaussian_distribution(tree, self.n_clones, self.threshold, net, self.cap, self.tol)
        self.certified_ = self.result_.certified
        return self
