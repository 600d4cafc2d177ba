"""
Support vector classifier as a Gibbs posterior.

log q(theta; D) = -2 sum_i max(0, 1 - y_i x_i' theta), with independent
Laplace(0, nu * sigma_k) priors on the coefficients.
"""
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field
from scipy.linalg import cho_solve, solve_triangular

from app.core.exceptions import DomainError
from app.core.rng_factory import RandomStream
from app.posteriors.base import PosteriorModel, WeightedParticleSet
from app.posteriors.dataset import DatasetView
from app.utils.distributions import inverse_gaussian
from app.utils.linalg import cholesky_spd

MARGIN_FLOOR = 1e-12


class SvmHyper(BaseModel):
    nu: float = Field(default=10.0, gt=0, description="Laplace scale multiplier")


class SupportVectorModel(PosteriorModel):
    """Hinge-loss pseudolikelihood with a scaled Laplace prior."""

    kind = "svm"

    def __init__(
        self,
        scales: Sequence[float],
        hyper: Optional[SvmHyper] = None,
        coverage_coords: Optional[Sequence[int]] = None,
    ):
        self.hyper = hyper or SvmHyper()
        scales = np.asarray(scales, dtype=float)
        if np.any(scales <= 0):
            raise DomainError("feature scales must be positive")
        # Laplace scale per coefficient
        self.prior_scales = self.hyper.nu * scales
        super().__init__([f"theta{k}" for k in range(1, scales.shape[0] + 1)], coverage_coords)

    def log_pseudolik_rows(self, theta: np.ndarray, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise DomainError("responses must be -1 or +1")
        margins = y * (np.asarray(theta, dtype=float) @ X.T)
        return -2.0 * np.sum(np.maximum(0.0, 1.0 - margins), axis=-1)

    def log_prior(self, theta: np.ndarray) -> np.ndarray:
        """Unnormalized log prior, -sum_k |theta_k| / (nu sigma_k)."""
        return -np.sum(np.abs(theta) / self.prior_scales, axis=-1)

    def simulate(
        self,
        eta: float,
        view: DatasetView,
        n_draws: int,
        warmup: int,
        rng: RandomStream,
        replicate: int = 0,
    ) -> WeightedParticleSet:
        """
        Data-augmentation Gibbs sampler with eta folded into the hinge term.

        With v_i = eta (1 - y_i x_i' theta), latent lam_i and omega_k:
          theta | lam, omega ~ N(P^-1 c, P^-1),
              P = eta^2 sum_i x_i x_i' / lam_i + diag(1 / omega),
              c = eta sum_i y_i x_i (eta + lam_i) / lam_i
          1 / lam_i | theta ~ InvGaussian(1 / |v_i|, 1)
          1 / omega_k | theta ~ InvGaussian(1 / (b_k |theta_k|), 1 / b_k^2)
        where b_k = nu sigma_k and omega_k is the exponential scale mixture
        behind the Laplace(0, b_k) prior.
        """
        self._check_run_args(eta, n_draws, warmup)
        X, y = view.X, view.y
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise DomainError("responses must be -1 or +1")
        n, k = X.shape
        b = self.prior_scales
        yX = y[:, None] * X

        lam = np.ones(n)
        omega = 2.0 * b * b
        n_sweeps = warmup + n_draws
        z = rng.standard_normal((n_sweeps, k))

        kept = np.empty((n_draws, k))
        for t in range(n_sweeps):
            inv_lam = 1.0 / lam
            precision = eta * eta * ((X.T * inv_lam) @ X) + np.diag(1.0 / omega)
            linear = eta * (yX.T @ ((eta + lam) * inv_lam))
            factor = cholesky_spd(precision)
            theta = cho_solve((factor, True), linear) + solve_triangular(factor.T, z[t], lower=False)

            v = eta * (1.0 - yX @ theta)
            lam = 1.0 / inverse_gaussian(1.0 / np.maximum(np.abs(v), MARGIN_FLOOR), 1.0, rng)
            omega = 1.0 / inverse_gaussian(
                1.0 / (b * np.maximum(np.abs(theta), MARGIN_FLOOR)), 1.0 / (b * b), rng
            )
            if t >= warmup:
                kept[t - warmup] = theta

        return WeightedParticleSet.from_draws(
            kept, self.log_pseudolik_rows(kept, X, y), eta, replicate
        )
