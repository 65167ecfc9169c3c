"""Empirical Hoelder envelopes ``sup_G1 |f| <= C (sup_g |f|)^theta``.

An ensemble of bounded sources is pushed through the forward model, the
pair of sup-norms on the two segments is recorded for each member, and the
tightest log-log upper envelope is fitted to the resulting cloud.  The fit
only summarizes the sample; it certifies nothing about the true constants.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .forward import SourceField, assemble_kernel, eval_field, paper_source
from .geometry import QuadratureGrid, SegmentSampling, distance_to_domain, sample_segment, segments_disjoint

__all__ = [
    "StabilityReport",
    "generate_ensemble",
    "sup_norm_on",
    "fit_envelope",
    "envelope_constant",
    "run_probe",
    "THETA_GRID",
]

log = logging.getLogger(__name__)

THETA_GRID = np.arange(1, 2001) / 1000.0
FAMILIES = ("nodewise", "bumps", "paper")
# relative slack when checking points against the fitted envelope
_ENVELOPE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class StabilityReport:
    """Sup-norm pairs ``(u_k, v_k)`` on (gamma, Gamma_1) and their envelope."""

    u: np.ndarray
    v: np.ndarray
    fitted_theta: float
    fitted_C: float
    tightness: float
    envelope_valid: bool
    violations: np.ndarray
    ensemble_spec: dict = field(default_factory=dict)
    M: float | None = None
    distance_delta: float = 0.0
    refinement_change: float = 0.0

    @property
    def count(self):
        return self.u.shape[0]

    @property
    def samples(self):
        return np.column_stack([self.u, self.v])


def _bump_field(grid, rng, M):
    nodes = grid.nodes
    mu = np.zeros(grid.size)
    for _ in range(rng.integers(1, 4)):
        center = nodes[rng.integers(grid.size)]
        width = rng.uniform(0.1, 0.5)
        amp = rng.uniform(-1.0, 1.0)
        mu += amp * np.exp(-np.sum((nodes - center) ** 2, axis=1) / (2.0 * width**2))
    peak = np.max(np.abs(mu))
    if peak > 0:
        mu *= rng.uniform(0.0, M) / peak
    return mu


def generate_ensemble(grid: QuadratureGrid, M, count, seed, families=FAMILIES):
    """Deterministic mix of admissible sources with ``max |mu| <= M``.

    Members cycle through ``families``:

    ``"nodewise"``
        ``M * s * N(0, 1)`` per node with random ``s`` in (0, 1], clipped
        to [-M, M].
    ``"bumps"``
        One to three Gaussian bumps centered at random nodes with signed
        amplitudes, rescaled to a random sup-norm in [0, M).
    ``"paper"``
        :func:`~doseline.forward.paper_source` times ``t``, with ``t``
        uniform in ``(0, M / max|paper_source|]``.
    """
    if not M > 0:
        raise PreconditionError(f"M must be positive, got {M}")
    if int(count) != count or count < 1:
        raise PreconditionError(f"count must be an integer >= 1, got {count}")
    unknown = set(families) - set(FAMILIES)
    if unknown or not families:
        raise PreconditionError(f"unknown generator families {sorted(unknown)}")

    rng = np.random.default_rng(seed)
    base = paper_source(grid)
    t_max = M / base.sup_norm
    members = []
    for k in range(int(count)):
        family = families[k % len(families)]
        if family == "nodewise":
            s = 1.0 - rng.random()
            mu = np.clip(M * s * rng.standard_normal(grid.size), -M, M)
        elif family == "bumps":
            mu = _bump_field(grid, rng, M)
        else:
            mu = (1.0 - rng.random()) * t_max * base.values
            mu = np.clip(mu, -M, M)
        members.append(SourceField(mu, grid, M))
    return members


def sup_norm_on(source: SourceField, sampling: SegmentSampling) -> float:
    """``max_i |f(p_i)|`` over the sampling points."""
    return float(np.max(np.abs(eval_field(source, sampling.points))))


def _sup_norms(members, sampling):
    # one kernel for all members; same arithmetic as eval_field row by row
    values = np.column_stack([mu.values for mu in members])
    fields = assemble_kernel(members[0].grid, sampling).entries @ values
    return np.max(np.abs(fields), axis=0)


def envelope_constant(u, v, theta):
    """Smallest ``C`` with ``v_k <= C u_k^theta`` for every pair with u_k > 0."""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    pos = u > 0
    if not pos.any():
        return 0.0
    return float(np.max(v[pos] / u[pos] ** theta))


def fit_envelope(u, v, thetas=THETA_GRID):
    """Tightest upper envelope ``v <= C u^theta`` in log-log coordinates.

    For each candidate ``theta`` the envelope constant is
    ``C(theta) = max_k v_k / u_k^theta`` and the tightness score is the total
    log-gap ``sum_k (log C + theta log u_k - log v_k)``.  The candidate with
    the smallest score wins; ties go to the candidate nearest 1.

    Pairs with ``u_k = v_k = 0`` carry no information and are skipped.

    Returns
    -------
    theta, C, tightness : float
        ``theta = 1, C = 0, tightness = 0`` if no pair is informative.
    """
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    use = (u > 0) & (v > 0)
    if not use.any():
        return 1.0, envelope_constant(u, v, 1.0), 0.0
    lu, lv = np.log(u[use]), np.log(v[use])
    thetas = np.asarray(thetas, dtype=float)
    # gaps[t, k] = log v_k - theta_t log u_k; log C(theta) is its row max
    gaps = lv[None, :] - thetas[:, None] * lu[None, :]
    log_c = gaps.max(axis=1)
    score = np.sum(log_c[:, None] - gaps, axis=1)
    best = np.flatnonzero(score <= score.min() * (1 + 1e-12) + 1e-15)
    k = best[np.argmin(np.abs(thetas[best] - 1.0))]
    theta = float(thetas[k])
    return theta, envelope_constant(u, v, theta), float(score[k])


def _check_in_E(sampling, grid, distance_delta, name):
    d = distance_to_domain(sampling.points, grid)
    bad = np.flatnonzero(d <= distance_delta)
    if bad.size:
        i = bad[0]
        raise PreconditionError(
            f"{name} point {sampling.points[i].tolist()} is at distance {d[i]:.6g} "
            f"from the source grid, not beyond distance_delta = {distance_delta}"
        )


def run_probe(
    ensemble,
    gamma_sampling: SegmentSampling,
    gamma1_sampling: SegmentSampling,
    distance_delta,
    ensemble_spec=None,
    M=None,
) -> StabilityReport:
    """Sup-norm pairs for every ensemble member plus the fitted envelope.

    Both segments must lie in ``{dist(x, D) > distance_delta}`` (checked at
    every sampling point) and must be disjoint.
    """
    members = list(ensemble)
    if not members:
        raise PreconditionError("empty ensemble")
    grid = members[0].grid
    if not segments_disjoint(gamma_sampling.segment, gamma1_sampling.segment):
        raise PreconditionError("gamma and Gamma_1 must be disjoint")
    _check_in_E(gamma_sampling, grid, distance_delta, "gamma")
    _check_in_E(gamma1_sampling, grid, distance_delta, "Gamma_1")

    u = _sup_norms(members, gamma_sampling)
    v = _sup_norms(members, gamma1_sampling)
    theta, C, tight = fit_envelope(u, v)

    violations = (u == 0) & (v > 0)
    slack = v <= C * u**theta * (1 + _ENVELOPE_RTOL)
    valid = bool(np.all(slack | ((u == 0) & (v == 0))) and not violations.any())

    # sup-norm sampling check, once per run, on the smooth reference source
    reference = paper_source(grid)
    change = 0.0
    for sampling in (gamma_sampling, gamma1_sampling):
        coarse, fine = (
            _sup_norms([reference], s)[0]
            for s in (sampling, sample_segment(sampling.segment, 2 * sampling.count))
        )
        change = max(change, abs(fine - coarse) / fine)
    if change >= 1e-3:
        log.warning("sup-norm changes by %.3g under sampling refinement", change)

    return StabilityReport(
        u=u,
        v=v,
        fitted_theta=theta,
        fitted_C=C,
        tightness=tight,
        envelope_valid=valid,
        violations=np.flatnonzero(violations),
        ensemble_spec=dict(ensemble_spec or {}),
        M=M,
        distance_delta=float(distance_delta),
        refinement_change=float(change),
    )
