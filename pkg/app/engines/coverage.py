"""
Credible boxes from weighted particles and the bootstrap coverage estimate.
"""
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.exceptions import DegenerateSetError, DomainError
from app.posteriors.base import WeightedParticleSet
from app.utils.weights import weighted_quantile_columns


class CredibleSet(BaseModel):
    """Per-coordinate equal-tailed intervals [lo_k, hi_k] at level 1 - alpha."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    coords: List[int]
    lo: np.ndarray
    hi: np.ndarray
    level: float

    def contains(self, point) -> bool:
        """Closed-interval containment of point (given on coords)."""
        point = np.asarray(point, dtype=float)
        return bool(np.all((self.lo <= point) & (point <= self.hi)))


class Evaluation(NamedTuple):
    """Coverage evaluation of a particle bank at one learning rate."""
    c_hat: float
    theta_hat: np.ndarray
    degenerate: bool
    box_lo: np.ndarray  # replicate-0 box
    box_hi: np.ndarray


def credible_bounds(particles: np.ndarray, weights: np.ndarray, alpha: float, coords: Sequence[int]):
    """
    Batched credible boxes.

    Args:
        particles: (R, M, K) draws
        weights: (R, M) normalized weights
        alpha: 1 - credible level
        coords: parameter indices entering the box

    Returns:
        (lo, hi), each (R, len(coords))
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if particles.shape[1] < 2:
        raise DegenerateSetError("a credible set needs at least two particles")
    q = weighted_quantile_columns(particles[:, :, list(coords)], weights, (alpha / 2.0, 1.0 - alpha / 2.0))
    return q[:, 0, :], q[:, 1, :]


def credible_box(
    pset: WeightedParticleSet,
    alpha: float,
    coverage_coords: Sequence[int],
    weights: Optional[np.ndarray] = None,
) -> CredibleSet:
    """Credible box of one particle set, optionally under overriding weights."""
    w = pset.weights if weights is None else np.asarray(weights, dtype=float)
    lo, hi = credible_bounds(pset.particles[None], w[None], alpha, coverage_coords)
    return CredibleSet(coords=list(coverage_coords), lo=lo[0], hi=hi[0], level=1.0 - alpha)


def coverage_from_bounds(theta_hat, lo: np.ndarray, hi: np.ndarray) -> float:
    """Fraction of boxes (rows of lo / hi) containing theta_hat in every coordinate."""
    theta_hat = np.asarray(theta_hat, dtype=float)
    inside = np.all((lo <= theta_hat) & (theta_hat <= hi), axis=1)
    return float(np.count_nonzero(inside)) / lo.shape[0]


def estimate_coverage(theta_hat, sets: Sequence[CredibleSet]) -> float:
    """
    c_hat = (1/B) sum_b 1{theta_hat in C_b}.

    theta_hat is given on the sets' coordinates; endpoints count as covered.
    """
    if not sets:
        raise DomainError("coverage needs at least one credible set")
    lo = np.stack([s.lo for s in sets])
    hi = np.stack([s.hi for s in sets])
    return coverage_from_bounds(theta_hat, lo, hi)
