"""Dose-rate field of a volume source and its harmonic extension.

The field is the 1/r^2 potential ``f(x) = int_D mu(y) / |x - y|^2 dy``,
discretized on a :class:`~doseline.geometry.QuadratureGrid` as
``sum_j mu_j w_j / |x - q_j|^2``.  Adding a fourth coordinate ``xi``,
``G(x, xi) = int_D mu(y) / (|x - y|^2 + xi^2) dy`` is harmonic in R^4 away
from the source and reduces to ``f`` at ``xi = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDataError, PreconditionError, SingularEvaluationError
from .geometry import QuadratureGrid, SegmentSampling, distance_to_domain

__all__ = [
    "SourceField",
    "KernelMatrix",
    "paper_source",
    "eval_field",
    "assemble_kernel",
    "eval_extension",
    "laplacian_residual",
]

# relative to the bounding-box diagonal
SINGULAR_GUARD = 1e-12
# kernel rows are built in blocks of at most this many entries
_BLOCK = 1 << 22


@dataclass(frozen=True, eq=False)
class SourceField:
    """Nodewise source density on a quadrature grid.

    Parameters
    ----------
    values : array_like, shape (N,)
        Density at each grid node.
    grid : QuadratureGrid
    bound : float, optional
        Sup-norm budget ``M``.  When given, ``max |values| <= M`` is enforced,
        i.e. the field is a member of the admissible set.
    """

    values: np.ndarray
    grid: QuadratureGrid
    bound: float | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.shape[0] != self.grid.size:
            raise InvalidDataError(
                f"source has {v.shape[0]} values but the grid has {self.grid.size} nodes"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidDataError("source values must be finite")
        if self.bound is not None:
            if not self.bound > 0:
                raise PreconditionError(f"bound M must be positive, got {self.bound}")
            if np.max(np.abs(v)) > self.bound:
                raise PreconditionError(
                    f"max |mu| = {np.max(np.abs(v)):.6g} exceeds the bound M = {self.bound}"
                )
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def scaled(self, t):
        bound = None if self.bound is None else self.bound * abs(t)
        return SourceField(t * self.values, self.grid, bound or None)


def paper_source(grid: QuadratureGrid, amplitude=1.0, bound=None) -> SourceField:
    """Radially modulated Gaussian ``(1 + 0.5 sin(2 pi |y|)) exp(-|y|^2)``
    sampled at the grid nodes (the grid mask supplies the indicator of the
    half-ball)."""
    r = np.linalg.norm(grid.nodes, axis=1)
    mu = amplitude * (1.0 + 0.5 * np.sin(2.0 * np.pi * r)) * np.exp(-(r**2))
    return SourceField(mu, grid, bound)


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Dense collocation matrix ``A_ij = w_j / |p_i - q_j|^2``."""

    entries: np.ndarray
    grid: QuadratureGrid
    sampling: SegmentSampling

    @property
    def shape(self):
        return self.entries.shape

    def __matmul__(self, mu):
        return self.entries @ np.asarray(mu, dtype=float)


def _squared_distances(points, nodes):
    # |p|^2 - 2 p.q + |q|^2 loses accuracy near nodes; use differences
    r2 = np.subtract.outer(points[:, 0], nodes[:, 0]) ** 2
    r2 += np.subtract.outer(points[:, 1], nodes[:, 1]) ** 2
    r2 += np.subtract.outer(points[:, 2], nodes[:, 2]) ** 2
    return r2


def _kernel_rows(points, grid, xi2=0.0):
    """Rows ``w_j / (|p_i - q_j|^2 + xi^2)`` for every point; raises on a
    (numerically) coincident node."""
    guard = (SINGULAR_GUARD * grid.diameter) ** 2
    r2 = _squared_distances(points, grid.nodes) + xi2
    bad = np.argwhere(r2 <= guard)
    if bad.size:
        i, j = bad[0]
        raise SingularEvaluationError(
            f"evaluation point {i} {points[i].tolist()} coincides with node {j} "
            f"{grid.nodes[j].tolist()}"
        )
    return grid.weights / r2


def _evaluate(source, points, xi2):
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    pts = pts.reshape(-1, 3)
    xi2 = np.broadcast_to(np.asarray(xi2, dtype=float), (pts.shape[0],))
    step = max(1, _BLOCK // source.grid.size)
    out = np.empty(pts.shape[0])
    for s in range(0, pts.shape[0], step):
        block = slice(s, s + step)
        out[block] = _kernel_rows(pts[block], source.grid, xi2[block, None]) @ source.values
    return float(out[0]) if single else out


def eval_field(source: SourceField, x):
    """Discrete dose rate ``sum_j mu_j w_j / |x - q_j|^2``.

    ``x`` may be a single 3-vector (returns a float) or an ``(k, 3)`` array.
    """
    return _evaluate(source, x, 0.0)


def assemble_kernel(grid: QuadratureGrid, sampling: SegmentSampling) -> KernelMatrix:
    """Collocation matrix mapping nodal source values to the field at the
    sampling points.  ``A @ mu`` reproduces :func:`eval_field` at each point
    along the identical arithmetic path."""
    try:
        rows = _kernel_rows(np.asarray(sampling.points), grid)
    except SingularEvaluationError as exc:
        raise SingularEvaluationError(f"singular kernel: {exc}") from None
    rows.setflags(write=False)
    return KernelMatrix(rows, grid, sampling)


def eval_extension(source: SourceField, x, xi):
    """Harmonic extension ``G(x, xi) = sum_j mu_j w_j / (|x - q_j|^2 + xi^2)``.

    ``G(x, 0)`` is exactly :func:`eval_field`.  ``x`` may be a batch of
    points, in which case ``xi`` broadcasts against it.
    """
    return _evaluate(source, x, np.square(xi))


def laplacian_residual(source: SourceField, x, xi, h, distance_delta=0.0):
    """Second-order central-difference Laplacian of ``G`` in ``(x, xi)``.

    Uses the 9-point stencil (center plus +-h along each of the four axes)::

        sum_k [G(z + h e_k) + G(z - h e_k)] - 8 G(z)
        --------------------------------------------
                            h^2

    Since ``G`` is harmonic off the source, the result is pure truncation
    error of size O(h^2).

    Parameters
    ----------
    distance_delta : float
        Every stencil point must be farther than ``distance_delta / 2``
        (in R^4) from every source node ``(q_j, 0)``.
    """
    if not h > 0:
        raise PreconditionError(f"step h must be positive, got {h}")
    z = np.append(np.asarray(x, dtype=float), float(xi))
    offsets = np.vstack([np.zeros(4), h * np.eye(4), -h * np.eye(4)])
    stencil = z + offsets

    nearest = distance_to_domain(stencil[:, :3], source.grid)
    # 4-D distance to (q, 0) is at least sqrt(d_3^2 + xi^2)
    d4 = np.sqrt(nearest**2 + stencil[:, 3] ** 2)
    if np.min(d4) <= 0.5 * distance_delta or np.min(d4) <= SINGULAR_GUARD * source.grid.diameter:
        raise PreconditionError(
            f"stencil of radius {h} at {z.tolist()} comes within {np.min(d4):.3g} "
            f"of a source node (needs > {0.5 * distance_delta:.3g})"
        )
    g = eval_extension(source, stencil[:, :3], stencil[:, 3])
    return float((np.sum(g[1:]) - 8.0 * g[0]) / (h * h))
