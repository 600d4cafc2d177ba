"""
Model interface: log-pseudolikelihood log q(theta; D) plus an eta-tempered
posterior simulator targeting q(theta; D)^eta * p(theta).

A model covers both genuine likelihoods and loss-based pseudolikelihoods
exp{-N r(theta; D)}.
"""
import logging
from abc import ABC, abstractmethod
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.exceptions import DomainError
from app.core.rng_factory import RandomStream
from app.posteriors.dataset import DatasetView
from app.utils.weights import ess, normalize_log_weights

logger = logging.getLogger(__name__)

DEGENERATE_ESS = 1.0 + 1e-9


class WeightedParticleSet(BaseModel):
    """
    M posterior draws for one data replicate, with log-weights and the cached
    log-pseudolikelihood of every draw on that replicate.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    particles: np.ndarray        # (M, K_theta)
    log_weights: np.ndarray      # (M,)
    log_pseudolik: np.ndarray    # (M,)
    eta_at_simulation: float
    replicate: int = 0

    @property
    def n_particles(self) -> int:
        return self.particles.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return normalize_log_weights(self.log_weights)[0]

    @property
    def ess(self) -> float:
        return ess(self.weights)

    @classmethod
    def from_draws(
        cls,
        draws: np.ndarray,
        log_pseudolik: np.ndarray,
        eta: float,
        replicate: int = 0,
    ) -> "WeightedParticleSet":
        """Fresh simulation output: uniform weights 1/M."""
        m = draws.shape[0]
        return cls(
            particles=draws,
            log_weights=np.full(m, -np.log(m)),
            log_pseudolik=log_pseudolik,
            eta_at_simulation=eta,
            replicate=replicate,
        )


class PointEstimate(NamedTuple):
    value: np.ndarray
    degenerate: bool


def point_estimate(pset: WeightedParticleSet, weights: Optional[np.ndarray] = None) -> PointEstimate:
    """
    Weighted particle mean sum_m w_m theta_m.

    Args:
        pset: particle set
        weights: normalized weights overriding the set's own (used after
            reweighting)

    Returns:
        PointEstimate with degenerate=True when ESS collapsed to a single
        particle while M > 1
    """
    w = pset.weights if weights is None else np.asarray(weights, dtype=float)
    degenerate = pset.n_particles > 1 and ess(w) < DEGENERATE_ESS
    if degenerate:
        logger.warning("point estimate computed from degenerate weights (replicate %d)", pset.replicate)
    return PointEstimate(value=w @ pset.particles, degenerate=degenerate)


class PosteriorModel(ABC):
    """
    Interface every calibratable model implements.

    Models are immutable after construction and safe to share across workers.
    """

    kind: str = ""

    def __init__(self, param_names: Sequence[str], coverage_coords: Optional[Sequence[int]] = None):
        self.param_names: List[str] = list(param_names)
        coords = list(range(self.param_dim)) if coverage_coords is None else list(coverage_coords)
        if not coords or min(coords) < 0 or max(coords) >= self.param_dim:
            raise ValueError(f"coverage_coords {coords} out of range for {self.param_dim} parameters")
        self.coverage_coords: List[int] = coords

    @property
    def param_dim(self) -> int:
        return len(self.param_names)

    @abstractmethod
    def log_pseudolik_rows(self, theta: np.ndarray, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        """
        log q evaluated on explicit rows.

        Args:
            theta: (K_theta,) or (M, K_theta)
            X, y: the rows

        Returns:
            scalar array for a single theta, (M,) for a batch
        """

    @abstractmethod
    def simulate(
        self,
        eta: float,
        view: DatasetView,
        n_draws: int,
        warmup: int,
        rng: RandomStream,
        replicate: int = 0,
    ) -> WeightedParticleSet:
        """Run warmup + n_draws sweeps at eta and keep the last n_draws."""

    def log_pseudolik(self, theta: np.ndarray, view: DatasetView):
        """log q(theta; view), additive over the view's rows."""
        out = self.log_pseudolik_rows(np.asarray(theta, dtype=float), view.X, view.y)
        return float(out) if np.ndim(out) == 0 else out

    @staticmethod
    def _check_run_args(eta: float, n_draws: int, warmup: int) -> None:
        if not eta > 0:
            raise DomainError(f"eta must be positive, got {eta}")
        if n_draws < 1 or warmup < 0:
            raise DomainError("need n_draws >= 1 and warmup >= 0")
