"""Weighted Tikhonov reconstruction of the field from segment data.

The discretized cost is::

    J(mu) = sum_i (A mu - b)_i^2 l_i  +  alpha * sum_j mu_j^2 w_j

with line weights ``l`` on the measurement segment and volume weights ``w``
on the source grid.  Substituting ``nu = sqrt(w) mu`` turns it into a
standard-form problem with operator ``B = sqrt(L) A sqrt(W)^-1``, which has
only as many rows as there are collocation points.  Its thin SVD gives the
minimizer through filter factors ``s / (s^2 + alpha)``; this is the same
solution as a QR least-squares solve of the stacked system
``[sqrt(L) A; sqrt(alpha W)] mu = [sqrt(L) b; 0]`` without ever forming
that (N + M) x N matrix or the normal matrix ``A^T L A``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDataError, NumericalFailure, PreconditionError
from .forward import KernelMatrix, SourceField, eval_field
from .geometry import QuadratureGrid, SegmentSampling

__all__ = [
    "Measurement",
    "Reconstruction",
    "measure",
    "add_noise",
    "choose_alpha",
    "solve_tikhonov",
    "solve_least_norm",
    "reconstruct_field",
    "tikhonov_cost",
    "ALPHA_FLOOR",
]

ALPHA_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class Measurement:
    """Dose-rate readings ``b_i`` at the collocation points of a segment."""

    sampling: SegmentSampling
    values: np.ndarray
    noise_level: float = 0.0
    rng_seed: int | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.shape[0] != self.sampling.count:
            raise InvalidDataError(
                f"{v.shape[0]} readings for {self.sampling.count} collocation points"
            )
        if not self.noise_level >= 0:
            raise PreconditionError(f"noise level must be >= 0, got {self.noise_level}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def norm(self):
        """Weighted L2 norm on the segment, ``sqrt(sum b_i^2 l_i)``."""
        return _weighted_norm(self.values, self.sampling.line_weights)


@dataclass(frozen=True, eq=False)
class Reconstruction:
    """Regularized source estimate and its diagnostics.

    Attributes
    ----------
    mu_tilde : ndarray, shape (N,)
    alpha : float
        Regularization parameter; 0 marks the least-norm path.
    residual_norm : float
        ``sqrt(sum_i (A mu - b)_i^2 l_i)``.
    penalty_norm : float
        ``sqrt(sum_j mu_j^2 w_j)``.
    normal_eq_residual : float
        Sup norm of ``(A^T L A + alpha W) mu - A^T L b``.
    rhs_scale : float
        Sup norm of ``A^T L b``, the scale for ``normal_eq_residual``.
    singular_values : ndarray
        Singular values of the weight-scaled kernel.
    """

    mu_tilde: np.ndarray
    alpha: float
    residual_norm: float
    penalty_norm: float
    normal_eq_residual: float
    rhs_scale: float
    singular_values: np.ndarray

    @property
    def stationarity(self) -> float:
        """Relative normal-equation residual (0 when ``A^T L b = 0``)."""
        if self.rhs_scale == 0:
            return self.normal_eq_residual
        return self.normal_eq_residual / self.rhs_scale

    def source(self, grid: QuadratureGrid) -> SourceField:
        return SourceField(self.mu_tilde, grid)


def _weighted_norm(v, weights):
    return float(np.sqrt(np.sum(np.square(v) * weights)))


def measure(source: SourceField, sampling: SegmentSampling) -> Measurement:
    """Exact (noise-free) readings of ``source`` at the sampling points."""
    return Measurement(sampling, eval_field(source, sampling.points))


def add_noise(clean: Measurement, level, seed) -> Measurement:
    """Perturb readings by Gaussian noise of prescribed relative size.

    The raw standard-normal vector is rescaled so that its weighted L2 norm
    on the segment is exactly ``level`` times that of the clean data.
    """
    if not level >= 0:
        raise PreconditionError(f"noise level must be >= 0, got {level}")
    if level == 0:
        return Measurement(clean.sampling, clean.values, 0.0, seed)
    l = clean.sampling.line_weights
    target = level * clean.norm()
    if target == 0:
        raise PreconditionError("cannot scale noise relative to all-zero data")
    e = np.random.default_rng(seed).standard_normal(clean.sampling.count)
    e *= target / _weighted_norm(e, l)
    return Measurement(clean.sampling, clean.values + e, float(level), seed)


def choose_alpha(noise_level, c=1.0, floor=ALPHA_FLOOR):
    """``alpha = max(c * noise_level**2, floor)``."""
    if not noise_level >= 0:
        raise PreconditionError(f"noise level must be >= 0, got {noise_level}")
    if not c > 0:
        raise PreconditionError(f"alpha constant must be positive, got {c}")
    return max(c * float(noise_level) ** 2, floor)


def _check_inputs(kernel, meas):
    A = np.asarray(kernel.entries, dtype=float)
    b = np.asarray(meas.values, dtype=float)
    l = np.asarray(meas.sampling.line_weights, dtype=float)
    w = np.asarray(kernel.grid.weights, dtype=float)
    if A.shape != (b.shape[0], w.shape[0]) or l.shape != b.shape:
        raise InvalidDataError(
            f"inconsistent dimensions: A {A.shape}, b {b.shape}, l {l.shape}, w {w.shape}"
        )
    for name, arr in (("kernel", A), ("measurement", b), ("line weights", l), ("weights", w)):
        if not np.all(np.isfinite(arr)):
            raise InvalidDataError(f"non-finite values in {name}")
    return A, b, l, w


def _svd(B):
    try:
        U, s, Vt = np.linalg.svd(B, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}", {"shape": B.shape}) from exc
    if not np.all(np.isfinite(s)):
        raise NumericalFailure("SVD produced non-finite singular values", {"shape": B.shape})
    return U, s, Vt


def _finish(A, b, l, w, mu, alpha, s):
    r = A @ mu - b
    rhs = A.T @ (l * b)
    grad = A.T @ (l * r) + alpha * w * mu
    return Reconstruction(
        mu_tilde=mu,
        alpha=float(alpha),
        residual_norm=_weighted_norm(r, l),
        penalty_norm=_weighted_norm(mu, w),
        normal_eq_residual=float(np.max(np.abs(grad))),
        rhs_scale=float(np.max(np.abs(rhs))),
        singular_values=s,
    )


def _solve(kernel, meas, alpha, filt):
    A, b, l, w = _check_inputs(kernel, meas)
    sl, sw = np.sqrt(l), np.sqrt(w)
    U, s, Vt = _svd(sl[:, None] * A / sw[None, :])
    coef = filt(s) * (U.T @ (sl * b))
    mu = (Vt.T @ coef) / sw
    if not np.all(np.isfinite(mu)):
        cond = s[0] / s[-1] if s[-1] > 0 else np.inf
        raise NumericalFailure(
            "reconstruction is not finite",
            {"alpha": alpha, "sigma_max": s[0], "sigma_min": s[-1], "condition": cond},
        )
    return _finish(A, b, l, w, mu, alpha, s)


def solve_tikhonov(kernel: KernelMatrix, meas: Measurement, alpha) -> Reconstruction:
    """Unique minimizer of the weighted Tikhonov functional.

    Solves ``(A^T L A + alpha W) mu = A^T L b`` through the SVD of the
    weight-scaled kernel; see the module docstring.
    """
    if not (np.isfinite(alpha) and alpha > 0):
        raise PreconditionError(f"alpha must be positive and finite, got {alpha}")
    return _solve(kernel, meas, alpha, lambda s: s / (s * s + alpha))


def solve_least_norm(kernel: KernelMatrix, meas: Measurement, rcond=None) -> Reconstruction:
    """Minimum ``W``-norm minimizer of the ``L``-weighted residual.

    Pseudo-inverse solution of the weighted system; singular values below
    ``rcond * max(s)`` are treated as zero (default: machine epsilon times
    the larger matrix dimension, as in :func:`numpy.linalg.pinv`).
    """
    if rcond is None:
        rcond = np.finfo(float).eps * max(kernel.shape)

    def filt(s):
        keep = s > rcond * (s[0] if s.size else 0.0)
        out = np.zeros_like(s)
        out[keep] = 1.0 / s[keep]
        return out

    return _solve(kernel, meas, 0.0, filt)


def tikhonov_cost(kernel: KernelMatrix, meas: Measurement, alpha, mu):
    """Discretized cost ``sum (A mu - b)^2 l + alpha sum mu^2 w``."""
    r = kernel.entries @ mu - meas.values
    return float(
        np.sum(r * r * meas.sampling.line_weights)
        + alpha * np.sum(np.square(mu) * kernel.grid.weights)
    )


def reconstruct_field(recon: Reconstruction, grid: QuadratureGrid, x):
    """Field of the reconstructed source, ``sum_j mu~_j w_j / |x - q_j|^2``."""
    return eval_field(recon.source(grid), x)
