"""
Importance reweighting of simulated particles to a new learning rate.

Moving from eta_s to eta' multiplies each weight by q(theta; D_b)^(eta' - eta_s).
The cached log q values make this a vector operation that touches no data rows.
"""
from typing import Optional, Sequence, Union

import numpy as np

from app.core.exceptions import DomainError
from app.engines.coverage import Evaluation, coverage_from_bounds, credible_bounds
from app.posteriors.base import WeightedParticleSet, point_estimate
from app.utils.weights import ess_rows, normalize_log_weights, normalize_log_weight_rows


def reweight(pset: WeightedParticleSet, eta_new: float, eta_s: Optional[float] = None) -> np.ndarray:
    """
    Normalized log-weights of pset moved from eta_s to eta_new.

    Args:
        pset: particle set with cached log-pseudolikelihood
        eta_new: target learning rate
        eta_s: rate the particles were simulated at (default: pset.eta_at_simulation)

    Returns:
        log-weights summing to one in the linear domain
    """
    if not eta_new > 0:
        raise DomainError(f"eta must be positive, got {eta_new}")
    eta_s = pset.eta_at_simulation if eta_s is None else eta_s
    log_w = pset.log_weights + (eta_new - eta_s) * pset.log_pseudolik
    _, log_norm = normalize_log_weights(log_w)
    return log_w - log_norm


def ess_star(pset: WeightedParticleSet, eta_new: float, eta_s: Optional[float] = None) -> float:
    """ESS of pset after reweighting to eta_new; the set itself is not modified."""
    w, _ = normalize_log_weights(reweight(pset, eta_new, eta_s))
    return float(ess_rows(w[None])[0])


class ParticleBank:
    """
    The B + 1 particle sets of one outer round, stacked for batched
    reweighting. Row 0 is the original data, rows 1..B the bootstrap
    replicates.
    """

    def __init__(self, psets: Sequence[WeightedParticleSet]):
        if len(psets) < 2:
            raise DomainError("a particle bank needs the original set and at least one replicate")
        etas = {p.eta_at_simulation for p in psets}
        if len(etas) != 1:
            raise DomainError(f"particle sets were simulated at different learning rates: {sorted(etas)}")
        self.psets = list(psets)
        self.eta_s = etas.pop()
        self.particles = np.stack([p.particles for p in psets])          # (R, M, K)
        self.base_log_weights = np.stack([p.log_weights for p in psets])  # (R, M)
        self.log_pseudolik = np.stack([p.log_pseudolik for p in psets])   # (R, M)

    @property
    def n_replicates(self) -> int:
        return len(self.psets) - 1

    @property
    def n_particles(self) -> int:
        return self.particles.shape[1]

    def log_weights_at(self, eta: float) -> np.ndarray:
        """Unnormalized log-weights at eta, always computed from the base weights."""
        if not eta > 0:
            raise DomainError(f"eta must be positive, got {eta}")
        return self.base_log_weights + (eta - self.eta_s) * self.log_pseudolik

    def weights_at(self, eta: float) -> np.ndarray:
        return normalize_log_weight_rows(self.log_weights_at(eta))

    def ess_at(self, eta: float) -> np.ndarray:
        """ESS of every row after reweighting to eta."""
        return ess_rows(self.weights_at(eta))

    def evaluate(self, eta: float, alpha: float, coverage_coords: Sequence[int], weights: Optional[np.ndarray] = None) -> Evaluation:
        """
        theta_hat from row 0, credible boxes of every row and c_hat over rows 1..B.
        """
        w = self.weights_at(eta) if weights is None else weights
        estimate = point_estimate(self.psets[0], weights=w[0])
        lo, hi = credible_bounds(self.particles, w, alpha, coverage_coords)
        c_hat = coverage_from_bounds(estimate.value[list(coverage_coords)], lo[1:], hi[1:])
        return Evaluation(
            c_hat=c_hat,
            theta_hat=estimate.value,
            degenerate=estimate.degenerate,
            box_lo=lo[0],
            box_hi=hi[0],
        )


def min_ess_star(
    psets: Union[ParticleBank, Sequence[WeightedParticleSet]],
    eta_new: float,
    eta_s: Optional[float] = None,
) -> float:
    """
    minESS*(eta'; eta_s): the smallest post-reweighting ESS over replicates 1..B.

    Replicate 0 is excluded from the minimum.
    """
    bank = psets if isinstance(psets, ParticleBank) else ParticleBank(psets)
    if eta_s is not None and eta_s != bank.eta_s:
        raise DomainError(f"particles were simulated at {bank.eta_s}, not {eta_s}")
    return float(bank.ess_at(eta_new)[1:].min())
