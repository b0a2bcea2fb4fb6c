"""Epsilon-nets on the unit sphere and conic decomposition over a net."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ._validation import check_open_unit, check_positive_int, check_unit, check_vector, check_vectors
from .core import RandomStream

DEFAULT_MAX_REJECTIONS = 10_000
DEFAULT_MAX_POINTS = 10_000_000


class SizingError(ValueError):
    """Requested object would exceed a configured resource cap."""


class CoveringError(RuntimeError):
    """A direction was found with no net point within epsilon."""

    def __init__(self, direction, distance, epsilon):
        self.direction = np.asarray(direction)
        self.distance = distance
        super().__init__(
            f"direction {np.array2string(self.direction, precision=6)} is {distance:.6g} "
            f"from the net (epsilon={epsilon})"
        )


@dataclass(frozen=True)
class Net:
    """Antipodally symmetric finite subset of S^{n-1} with covering radius ``epsilon``."""

    points: np.ndarray
    epsilon: float

    def __post_init__(self):
        pts = check_vectors(self.points, name="points")
        norms = np.linalg.norm(pts, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("net points must have unit norm")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("net epsilon must lie in [0, 1)")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "epsilon", float(self.epsilon))

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    @classmethod
    def circle(cls, m: int, epsilon=None) -> "Net":
        """``m`` equispaced directions in the plane (``m`` even).

        The default epsilon is the chord between neighbours, 2 sin(pi/m),
        which is twice the exact covering radius.
        """
        m = check_positive_int(m, "m", minimum=2)
        if m % 2:
            raise ValueError("circle nets need an even number of points for antipodal symmetry")
        theta = 2.0 * math.pi * np.arange(m) / m
        pts = np.column_stack([np.cos(theta), np.sin(theta)])
        if epsilon is None:
            epsilon = 2.0 * math.sin(math.pi / m)
        return cls(pts, epsilon)

    def covering_radius_bound(self) -> float | None:
        """Exact covering radius when known in closed form (n <= 2), else None."""
        if self.dimension == 1:
            return 0.0
        if self.dimension == 2:
            ang = np.sort(np.mod(np.arctan2(self.points[:, 1], self.points[:, 0]), 2 * math.pi))
            gaps = np.diff(np.concatenate([ang, ang[:1] + 2 * math.pi]))
            return float(2.0 * math.sin(gaps.max() / 4.0))
        return None

    def nearest(self, u) -> tuple[int, float]:
        """Index of the nearest net point (lowest index on ties) and its distance."""
        u = check_vector(u, self.dimension, name="u")
        dots = self.points @ u
        k = int(np.argmax(dots))
        return k, float(np.linalg.norm(u - self.points[k]))

    def nearest_many(self, U):
        U = check_vectors(U, self.dimension, name="U")
        idx = np.argmax(U @ self.points.T, axis=1)
        return idx, np.linalg.norm(U - self.points[idx], axis=1)

    def contains(self, w, atol=1e-9) -> bool:
        k, dist = self.nearest(w)
        return dist <= atol

    def to_csv(self, comments=()) -> str:
        fh = io.StringIO()
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write(f"# epsilon={self.epsilon!r}\n")
        writer = csv.writer(fh, lineterminator="\n")
        for p in self.points:
            writer.writerow([repr(float(x)) for x in p])
        return fh.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Net":
        epsilon = None
        rows = []
        for line in text.splitlines():
            if line.startswith("# epsilon="):
                epsilon = float(line.split("=", 1)[1])
            elif line and not line.startswith("#"):
                rows.append([float(x) for x in line.split(",")])
        if epsilon is None:
            raise ValueError("net CSV lacks an epsilon line")
        return cls(np.array(rows), epsilon)


def net_size_bound(n: int, epsilon: float) -> float:
    """Volumetric bound (3/epsilon)^n on the size of a maximal epsilon-packing."""
    return (3.0 / epsilon) ** n


def build_net(
    n: int,
    epsilon: float,
    stream: RandomStream | None = None,
    max_rejections: int = DEFAULT_MAX_REJECTIONS,
    max_points: int = DEFAULT_MAX_POINTS,
) -> Net:
    """Build a symmetric epsilon-net of S^{n-1}.

    n = 1 gives {+1, -1} with epsilon 0. n = 2 gives equispaced angles whose
    chord spacing is at most epsilon (an exact cover). For n >= 3 random
    candidates are added, together with their antipodes, whenever they are at
    least epsilon from every chosen point, until ``max_rejections``
    consecutive candidates are rejected. Coverage is then made exact by
    filling every hole wider than epsilon, found from the convex hull.
    """
    n = check_positive_int(n, "n")
    epsilon = check_open_unit(epsilon, "epsilon")
    bound = net_size_bound(n, epsilon)
    if n == 1:
        return Net(np.array([[1.0], [-1.0]]), 0.0)
    if bound > max_points:
        raise SizingError(f"(3/epsilon)^n = {bound:.3g} exceeds the cap of {max_points} points")
    if n == 2:
        spacing = 2.0 * math.asin(epsilon / 2.0)
        m = math.ceil(2.0 * math.pi / spacing - 1e-12)
        m += m % 2
        net = Net.circle(m, epsilon)
    else:
        if stream is None:
            raise ValueError("a RandomStream is required for n >= 3")
        net = _greedy_packing(n, epsilon, stream, max_rejections, int(bound))
    if len(net) > bound:
        raise SizingError(f"net has {len(net)} points, above the (3/epsilon)^n bound {bound:.6g}")
    return net


def _greedy_packing(n, epsilon, stream, max_rejections, size_cap):
    chunk = 256
    pts = np.empty((0, n))
    rejected = 0
    while rejected < max_rejections:
        cand = stream.normal((chunk, n))
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        for c in cand:
            if pts.shape[0] and np.min(np.linalg.norm(pts - c, axis=1)) < epsilon:
                rejected += 1
                if rejected >= max_rejections:
                    break
                continue
            rejected = 0
            pts = np.vstack([pts, c, -c])
            if pts.shape[0] > size_cap:
                raise SizingError("greedy packing exceeded the (3/epsilon)^n bound")
    return Net(_fill_holes(pts, epsilon, size_cap), epsilon)


def _holes(pts):
    """Centres and chord radii of the empty caps of a symmetric point set.

    For points on the sphere every hull facet lies in a plane <u, x> = b with
    no point beyond it, so its unit normal u is a hole centre at chord
    distance sqrt(2 - 2b) from the facet's vertices. The largest of these is
    the exact covering radius.
    """
    hull = ConvexHull(pts)
    normals, b = hull.equations[:, :-1], -hull.equations[:, -1]
    normals = normals / np.linalg.norm(normals, axis=1, keepdims=True)
    return normals, np.sqrt(np.maximum(0.0, 2.0 - 2.0 * b))


def _fill_holes(pts, epsilon, size_cap):
    # a hole centre is farther than epsilon from every point, so adding it
    # and its antipode keeps the set epsilon-separated
    while True:
        try:
            centres, radii = _holes(pts)
        except QhullError as exc:
            raise CoveringError(np.zeros(pts.shape[1]), math.inf, epsilon) from exc
        order = np.argsort(-radii, kind="stable")
        added = False
        for k in order:
            if radii[k] <= epsilon:
                break
            u = centres[k]
            if np.min(np.linalg.norm(pts - u, axis=1)) <= epsilon:
                continue  # covered by a point added earlier in this pass
            pts = np.vstack([pts, u, -u])
            added = True
            if pts.shape[0] > size_cap:
                raise SizingError("net exceeded the (3/epsilon)^n bound")
        if not added:
            return pts


def conic_decompose(w0, net: Net, tol=1e-12, max_rounds=10_000) -> np.ndarray:
    """Nonnegative weights on the net points reconstructing ``w0``.

    Each round snaps the current residual direction to its nearest net point,
    charges the residual norm to that point, and continues with the leftover,
    whose norm shrinks by a factor of at most epsilon. Returns a dense weight
    vector aligned with ``net.points``; its l1 norm is at most 1/(1 - epsilon).
    Raises CoveringError if some residual direction is not within epsilon of
    the net.
    """
    w0 = check_vector(w0, net.dimension, name="w0")
    check_unit(w0, 1e-9, name="w0")
    if tol <= 0:
        raise ValueError("tol must be positive")
    lam = np.zeros(len(net))
    residual = w0.copy()
    for _ in range(max_rounds):
        r = float(np.linalg.norm(residual))
        if r <= tol:
            return lam
        u = residual / r
        k, dist = net.nearest(u)
        if dist > net.epsilon + 1e-12:
            raise CoveringError(u, dist, net.epsilon)
        lam[k] += r
        residual = residual - r * net.points[k]
    raise RuntimeError("conic decomposition did not converge")
