"""
Homoskedastic Gaussian linear regression, y_i = beta' x_i + e_i with
e_i ~ N(0, sigma2), under beta ~ N(0, prior_var I) and
sigma2 ~ IG(ig_shape, ig_rate) (shape / rate).
"""
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from app.core.exceptions import DomainError
from app.core.rng_factory import RandomStream
from app.posteriors.base import PosteriorModel, WeightedParticleSet
from app.posteriors.dataset import DatasetView

LOG_2PI = np.log(2.0 * np.pi)


class LinRegHyper(BaseModel):
    prior_var: float = Field(default=100.0, gt=0, description="Coefficient prior variance")
    ig_shape: float = Field(default=1.0, gt=0, description="Inverse-gamma shape for sigma2")
    ig_rate: float = Field(default=0.025, gt=0, description="Inverse-gamma rate for sigma2")
    sigma2_fixed: Optional[float] = Field(
        default=None, gt=0, description="Known error variance; skips the sigma2 block when set"
    )


class LinearRegressionModel(PosteriorModel):
    """
    Parameters are theta = (beta_1..beta_K, sigma2). Coverage checks use the
    K coefficients by default.
    """

    kind = "linreg"

    def __init__(
        self,
        n_features: int,
        hyper: Optional[LinRegHyper] = None,
        coverage_coords: Optional[Sequence[int]] = None,
    ):
        self.n_features = n_features
        self.hyper = hyper or LinRegHyper()
        names = [f"beta{k}" for k in range(1, n_features + 1)] + ["sigma2"]
        super().__init__(
            names,
            list(range(n_features)) if coverage_coords is None else coverage_coords,
        )

    def log_pseudolik_rows(self, theta: np.ndarray, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        beta, sigma2 = theta[..., :-1], theta[..., -1]
        if np.any(sigma2 <= 0):
            raise DomainError("sigma2 must be positive")
        resid = y - beta @ X.T
        n = y.shape[0]
        return -0.5 * n * (LOG_2PI + np.log(sigma2)) - 0.5 * np.sum(resid * resid, axis=-1) / sigma2

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
        Two-block Gibbs sampler for q(theta; view)^eta * prior.

        beta | sigma2 ~ N(V eta X'y / sigma2, V) with V = (eta X'X / sigma2 + I / prior_var)^-1
        sigma2 | beta ~ IG(ig_shape + eta N / 2, ig_rate + eta RSS(beta) / 2)

        With hyper.sigma2_fixed set, sigma2 stays at that value and every
        sweep is an independent draw of beta.

        X'X is diagonalized once (X'X = Q diag(lam) Q'), so the beta precision
        is diagonal in the rotated coordinates gamma = Q' beta for every sigma2
        and each sweep costs O(K) without a fresh factorization.
        """
        self._check_run_args(eta, n_draws, warmup)
        X, y = view.X, view.y
        n, k = X.shape
        hyper = self.hyper

        lam, Q = np.linalg.eigh(X.T @ X)
        lam = np.clip(lam, 0.0, None)
        r = Q.T @ (X.T @ y)
        yty = float(y @ y)
        inv_prior = 1.0 / hyper.prior_var
        post_shape = hyper.ig_shape + 0.5 * eta * n

        n_sweeps = warmup + n_draws
        z = rng.standard_normal((n_sweeps, k))
        g = rng.standard_gamma(post_shape, n_sweeps)

        kept_gamma = np.empty((n_draws, k))
        kept_sigma2 = np.empty(n_draws)
        fixed = hyper.sigma2_fixed
        sigma2 = 1.0 if fixed is None else fixed
        for t in range(n_sweeps):
            d = eta * lam / sigma2 + inv_prior
            gamma = (eta / sigma2) * r / d + z[t] / np.sqrt(d)
            if fixed is None:
                rss = max(yty - 2.0 * float(gamma @ r) + float(lam @ (gamma * gamma)), 0.0)
                sigma2 = (hyper.ig_rate + 0.5 * eta * rss) / g[t]
            if t >= warmup:
                kept_gamma[t - warmup] = gamma
                kept_sigma2[t - warmup] = sigma2

        draws = np.column_stack([kept_gamma @ Q.T, kept_sigma2])
        return WeightedParticleSet.from_draws(
            draws, self.log_pseudolik_rows(draws, X, y), eta, replicate
        )
