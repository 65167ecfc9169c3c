"""Source domains, tensor-grid quadrature and segment collocation.

The source domain ``D`` is either an axis-aligned box or the lower half-ball
``{|x| < R, x3 < 0}``.  Volume integrals over ``D`` are discretized by the
midpoint rule on a uniform tensor grid, keeping the cells whose centers fall
inside ``D``.  Measurement segments are sampled by the composite midpoint
rule, so every collocation point carries the same line weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateSegmentError, EmptyQuadratureError, PreconditionError

__all__ = [
    "Domain",
    "Box",
    "HalfBall",
    "QuadratureGrid",
    "Segment",
    "SegmentSampling",
    "build_grid",
    "sample_segment",
    "distance_to_domain",
    "segments_disjoint",
]


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


class Domain:
    """Bounded open set in R^3 described by a membership predicate."""

    def contains(self, points):
        raise NotImplementedError

    @property
    def volume(self) -> float:
        raise NotImplementedError

    @property
    def bounding_box(self) -> np.ndarray:
        """``(2, 3)`` array of lower and upper corners."""
        raise NotImplementedError


@dataclass(frozen=True)
class Box(Domain):
    """Open axis-aligned box ``lower < x < upper`` (componentwise)."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != 3 or len(hi) != 3:
            raise ValueError("box corners must be 3-vectors")
        if not all(a < b for a, b in zip(lo, hi)):
            raise ValueError(f"box is empty: lower={lo}, upper={hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def contains(self, points):
        p = np.asarray(points, dtype=float)
        return np.all((p > self.lower) & (p < self.upper), axis=-1)

    @property
    def volume(self):
        return float(np.prod(np.subtract(self.upper, self.lower)))

    @property
    def bounding_box(self):
        return np.array([self.lower, self.upper])


@dataclass(frozen=True)
class HalfBall(Domain):
    """Lower half-ball ``{y : |y| < radius, y3 < 0}``."""

    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))

    def contains(self, points):
        p = np.asarray(points, dtype=float)
        r2 = np.sum(p * p, axis=-1)
        return (r2 < self.radius**2) & (p[..., 2] < 0.0)

    @property
    def volume(self):
        return 2.0 / 3.0 * np.pi * self.radius**3

    @property
    def bounding_box(self):
        R = self.radius
        return np.array([[-R, -R, -R], [R, R, 0.0]])


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Masked tensor grid: cell centers ``nodes`` inside the domain and
    their cell volumes ``weights``."""

    nodes: np.ndarray
    weights: np.ndarray
    resolution: tuple
    bounding_box: np.ndarray
    domain: Domain | None = None
    _tree: cKDTree | None = field(default=None, repr=False, compare=False)

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    @property
    def cell_size(self) -> np.ndarray:
        return np.diff(self.bounding_box, axis=0)[0] / np.asarray(self.resolution)

    @property
    def diameter(self) -> float:
        """Length of the bounding-box diagonal."""
        return float(np.linalg.norm(np.diff(self.bounding_box, axis=0)))

    @classmethod
    def from_nodes(cls, nodes, weights, bounding_box=None):
        """Wrap explicit nodes and weights (used for small hand-built grids)."""
        nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
        weights = np.atleast_1d(np.asarray(weights, dtype=float))
        if nodes.shape[1] != 3 or weights.shape != (nodes.shape[0],):
            raise ValueError("nodes must be (N, 3) and weights (N,)")
        if nodes.shape[0] == 0:
            raise EmptyQuadratureError("empty quadrature: no nodes given")
        if np.any(weights <= 0):
            raise ValueError("quadrature weights must be strictly positive")
        if bounding_box is None:
            lo, hi = nodes.min(axis=0), nodes.max(axis=0)
            pad = np.maximum(hi - lo, 1.0) * 0.5
            bounding_box = np.array([lo - pad, hi + pad])
        return cls(_frozen(nodes), _frozen(weights), (1, 1, 1), _frozen(bounding_box))

    def tree(self) -> cKDTree:
        if self._tree is None:
            object.__setattr__(self, "_tree", cKDTree(self.nodes))
        return self._tree


def build_grid(domain: Domain, bounding_box=None, resolution=(40, 40, 20)) -> QuadratureGrid:
    """Cell-centered tensor grid over ``bounding_box`` restricted to ``domain``.

    A cell belongs to the domain iff its center does; every kept cell has
    weight equal to the full cell volume.

    Parameters
    ----------
    domain : Domain
        Membership predicate for the source region.
    bounding_box : array_like, shape (2, 3), optional
        Lower and upper corners of the tensor grid.  Defaults to the
        domain's own bounding box.
    resolution : tuple of int
        Number of cells along each axis.

    Returns
    -------
    QuadratureGrid
    """
    res = tuple(int(n) for n in resolution)
    if len(res) != 3 or min(res) < 1:
        raise PreconditionError(f"resolution must be three integers >= 1, got {resolution}")
    bbox = domain.bounding_box if bounding_box is None else np.asarray(bounding_box, dtype=float)
    if bbox.shape != (2, 3) or not np.all(bbox[1] > bbox[0]):
        raise PreconditionError(f"degenerate bounding box {bbox.tolist()}")

    h = (bbox[1] - bbox[0]) / res
    axes = [bbox[0, k] + h[k] * (np.arange(res[k]) + 0.5) for k in range(3)]
    centers = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    inside = domain.contains(centers)
    if not inside.any():
        raise EmptyQuadratureError(
            f"empty quadrature: no cell center of the {res} grid lies inside {domain}"
        )
    nodes = centers[inside]
    weights = np.full(nodes.shape[0], float(np.prod(h)))
    return QuadratureGrid(_frozen(nodes), _frozen(weights), res, _frozen(bbox), domain)


@dataclass(frozen=True)
class Segment:
    """Closed straight segment from ``a`` to ``b``."""

    a: tuple
    b: tuple

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        b = tuple(float(v) for v in self.b)
        if len(a) != 3 or len(b) != 3:
            raise ValueError("segment endpoints must be 3-vectors")
        if a == b:
            raise DegenerateSegmentError(f"degenerate segment: both endpoints are {a}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(np.subtract(self.b, self.a)))

    def point(self, t):
        """Point(s) at parameter ``t`` in [0, 1]."""
        t = np.asarray(t, dtype=float)
        a, b = np.asarray(self.a), np.asarray(self.b)
        return a + t[..., None] * (b - a)

    def distance(self, points):
        """Euclidean distance from ``points`` to the segment."""
        p = np.asarray(points, dtype=float)
        a, d = np.asarray(self.a), np.subtract(self.b, self.a)
        t = np.clip(((p - a) @ d) / (d @ d), 0.0, 1.0)
        return np.linalg.norm(p - (a + t[..., None] * d), axis=-1)

    def linspace(self, count):
        """``count`` evenly spaced points including both endpoints."""
        if count < 1:
            raise PreconditionError("count must be >= 1")
        t = np.linspace(0.0, 1.0, count) if count > 1 else np.array([0.5])
        return self.point(t)


@dataclass(frozen=True, eq=False)
class SegmentSampling:
    """Collocation points on a segment with composite-midpoint line weights."""

    segment: Segment
    points: np.ndarray
    line_weights: np.ndarray

    @property
    def count(self) -> int:
        return self.points.shape[0]


def sample_segment(segment: Segment, count: int) -> SegmentSampling:
    """Composite midpoint sampling: ``p_i`` at parameter ``(i - 1/2)/count``,
    each carrying weight ``length/count``."""
    if int(count) != count or count < 1:
        raise PreconditionError(f"count must be an integer >= 1, got {count}")
    count = int(count)
    t = (np.arange(count) + 0.5) / count
    weights = np.full(count, segment.length / count)
    return SegmentSampling(segment, _frozen(segment.point(t)), _frozen(weights))


def distance_to_domain(x, grid: QuadratureGrid):
    """Distance from ``x`` to the nearest quadrature node.

    This is the discrete stand-in for ``dist(x, D)``; it overestimates the
    continuous distance by at most one cell diagonal.  Accepts a single
    3-vector (returns a float) or an ``(k, 3)`` array.
    """
    if grid.size == 0:
        raise EmptyQuadratureError("empty quadrature")
    x = np.asarray(x, dtype=float)
    d, _ = grid.tree().query(x.reshape(-1, 3))
    return float(d[0]) if x.ndim == 1 else d


def segments_disjoint(s1: Segment, s2: Segment) -> bool:
    """True if the closed segments share no point."""
    # minimum distance between two segments; positive iff disjoint
    p1, p2 = np.asarray(s1.a), np.asarray(s2.a)
    d1, d2 = np.subtract(s1.b, s1.a), np.subtract(s2.b, s2.a)
    candidates = [
        s2.distance(s1.a), s2.distance(s1.b), s1.distance(s2.a), s1.distance(s2.b)
    ]
    n = np.cross(d1, d2)
    nn = n @ n
    if nn > 1e-24 * (d1 @ d1) * (d2 @ d2):
        r = p2 - p1
        t = np.cross(r, d2) @ n / nn
        u = np.cross(r, d1) @ n / nn
        if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
            candidates.append(np.linalg.norm(p1 + t * d1 - (p2 + u * d2)))
    return float(min(candidates)) > 1e-12 * max(s1.length, s2.length)
