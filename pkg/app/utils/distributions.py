"""
Samplers for the laws the posterior simulators need. All draws come from an
explicit RandomStream.
"""
import numpy as np

from app.core.exceptions import DomainError
from app.core.rng_factory import RandomStream


def _require_positive(name: str, value) -> None:
    arr = np.asarray(value, dtype=float)
    if np.isnan(arr).any() or np.any(arr <= 0):
        raise DomainError(f"{name} must be strictly positive")


def std_normal(rng: RandomStream, size=None):
    return rng.standard_normal(size)


def mvn(mean, chol_factor, rng: RandomStream, size=None) -> np.ndarray:
    """
    Multivariate normal with covariance chol_factor @ chol_factor.T.

    Returns a (K,) draw, or (size, K) draws when size is given.
    """
    mean = np.asarray(mean, dtype=float)
    factor = np.asarray(chol_factor, dtype=float)
    if size is None:
        return mean + factor @ std_normal(rng, mean.shape[0])
    z = std_normal(rng, (size, mean.shape[0]))
    return mean + z @ factor.T


def inverse_gamma(shape, rate, rng: RandomStream, size=None):
    """Inverse gamma with shape a and rate b (mean b / (a - 1) for a > 1)."""
    _require_positive("shape", shape)
    _require_positive("rate", rate)
    return rate / rng.standard_gamma(shape, size)


def exponential(rate, rng: RandomStream, size=None):
    _require_positive("rate", rate)
    return rng.standard_exponential(size) / rate


def uniform_index(n: int, rng: RandomStream, size=None):
    if n < 1:
        raise DomainError("uniform_index needs n >= 1")
    return rng.integers(n, size)


def inverse_gaussian(mean, shape, rng: RandomStream, size=None):
    """
    Inverse Gaussian (Wald) draws via the Michael-Schucany-Haas transformation.

    The root is written as mean / (1 + t + sqrt(t^2 + 2t)) with
    t = mean * chi2_1 / (2 * shape), which stays accurate when mean / shape is
    huge; numpy's Generator.wald cancels catastrophically in that regime.
    """
    _require_positive("mean", mean)
    _require_positive("shape", shape)
    mean = np.asarray(mean, dtype=float)
    shape = np.asarray(shape, dtype=float)
    out_shape = size if size is not None else np.broadcast(mean, shape).shape
    nu = std_normal(rng, out_shape)
    u = rng.uniform(out_shape)
    t = mean * nu * nu / (2.0 * shape)
    root = mean / (1.0 + t + np.sqrt(t * t + 2.0 * t))
    draw = np.where(u * (mean + root) <= mean, root, mean * mean / root)
    return draw if np.ndim(draw) else float(draw)
