"""
Synthetic heteroskedastic regression data.

Covariates x1..x3 are iid standard normal and the error variance steps up
with x1: the low level below the lower sample percentile of x1, the middle
level in between, the high level above the upper percentile.
"""
import numpy as np

from app.core.rng_factory import DATA, RandomStream
from app.posteriors.dataset import Dataset
from app.schemas.experiment import SynthConfig
from app.utils.weights import weighted_quantile


def sample_percentile(values: np.ndarray, p: float) -> float:
    """Left-continuous order statistic: the smallest x with F_N(x) >= p."""
    values = np.asarray(values, dtype=float)
    return weighted_quantile(values, np.full(values.size, 1.0 / values.size), p)


def error_variances(x1: np.ndarray, cfg: SynthConfig) -> np.ndarray:
    """Per-row error variance from the position of x1 relative to its sample percentiles."""
    low, mid, high = cfg.variance_levels
    lo_cut = sample_percentile(x1, cfg.cut_points[0])
    hi_cut = sample_percentile(x1, cfg.cut_points[1])
    variances = np.full(x1.shape, mid)
    variances[x1 < lo_cut] = low
    variances[x1 > hi_cut] = high
    return variances


def gen_linreg_data(cfg: SynthConfig, dataset_id: int = 0) -> Dataset:
    """
    Generate one dataset.

    Args:
        cfg: generator settings (N, true coefficients, variance levels, seed)
        dataset_id: index of the dataset under cfg.seed; every id draws from
            its own stream (seed, dataset_id, DATA)

    Returns:
        Dataset with an intercept and covariates x1..x{K-1}
    """
    stream = RandomStream(cfg.seed).spawn(dataset_id, DATA)
    beta = np.asarray(cfg.beta_true, dtype=float)
    k = beta.shape[0]
    covariates = stream.standard_normal((cfg.n_rows, k - 1))
    noise = stream.standard_normal(cfg.n_rows)

    variances = error_variances(covariates[:, 0], cfg)
    X = np.column_stack([np.ones(cfg.n_rows), covariates])
    y = X @ beta + np.sqrt(variances) * noise
    return Dataset.from_covariates(y, covariates)
