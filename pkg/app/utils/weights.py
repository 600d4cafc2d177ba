"""
Log-domain weight arithmetic for particle systems: logsumexp, normalization,
effective sample size and weighted quantiles.
"""
from typing import Tuple

import numpy as np
from scipy.special import logsumexp as _logsumexp

from app.core.exceptions import ContractViolation, DegenerateWeightsError, DomainError

ESS_TOLERANCE = 1e-9
# cumulative weights within this (relative) distance of p count as reaching it
QUANTILE_RTOL = 1e-10


def logsumexp(values) -> float:
    """
    Stable log(sum(exp(v))) via max shift.

    Returns -inf iff every entry is -inf.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise DomainError("logsumexp of an empty vector")
    if np.isnan(v).any():
        raise DomainError("logsumexp input contains NaN")
    if np.all(np.isneginf(v)):
        return -np.inf
    return float(_logsumexp(v))


def normalize_log_weights(log_weights) -> Tuple[np.ndarray, float]:
    """
    Normalize log-weights.

    Args:
        log_weights: vector of log-weights (-inf allowed, NaN not)

    Returns:
        (weights, log_normalizer) with weights summing to one
    """
    lw = np.asarray(log_weights, dtype=float)
    log_norm = logsumexp(lw)
    if np.isneginf(log_norm):
        raise DegenerateWeightsError("all log-weights are -inf")
    return np.exp(lw - log_norm), log_norm


def normalize_log_weight_rows(log_weights: np.ndarray) -> np.ndarray:
    """Row-wise normalization of a (R, M) block of log-weights."""
    lw = np.asarray(log_weights, dtype=float)
    log_norm = _logsumexp(lw, axis=-1, keepdims=True)
    if np.isneginf(log_norm).any():
        bad = int(np.flatnonzero(np.isneginf(log_norm.ravel()))[0])
        raise DegenerateWeightsError(f"all log-weights are -inf in row {bad}")
    return np.exp(lw - log_norm)


def ess(weights) -> float:
    """Effective sample size 1 / sum(w^2) of normalized weights."""
    w = np.asarray(weights, dtype=float)
    total = w.sum()
    if abs(total - 1.0) > ESS_TOLERANCE:
        raise ContractViolation(f"weights are not normalized (sum = {total!r})")
    return float(np.clip(1.0 / np.dot(w, w), 1.0, w.size))


def ess_rows(weights: np.ndarray) -> np.ndarray:
    """ESS of every row of a (R, M) block of normalized weights."""
    w = np.asarray(weights, dtype=float)
    totals = w.sum(axis=-1)
    if np.any(np.abs(totals - 1.0) > ESS_TOLERANCE):
        raise ContractViolation("weights are not normalized")
    return np.clip(1.0 / np.einsum("...m,...m->...", w, w), 1.0, w.shape[-1])


def weighted_quantile(values, weights, p: float) -> float:
    """
    Left-continuous weighted inverse CDF.

    Returns the smallest sorted value whose cumulative weight reaches p;
    p = 0 returns the minimum. No interpolation, so the result is always
    one of the values. With uniform weights this is ordered[ceil(pM) - 1]
    even when pM is an integer and the cumulative sum rounds below p.
    """
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    if v.size == 0 or v.shape != w.shape:
        raise DomainError("values and weights must be non-empty and of equal length")
    if np.isnan(v).any():
        raise DomainError("values contain NaN")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    order = np.argsort(v, kind="stable")
    cum = np.cumsum(w[order])
    j = min(int(np.searchsorted(cum, p - QUANTILE_RTOL * cum[-1], side="left")), v.size - 1)
    return float(v[order][j])


def weighted_quantile_columns(values: np.ndarray, weights: np.ndarray, probs) -> np.ndarray:
    """
    Batched weighted_quantile.

    Args:
        values: (R, M, K) particle coordinates
        weights: (R, M) normalized weights
        probs: sequence of P probabilities

    Returns:
        (R, P, K) quantiles, identical to weighted_quantile applied to every
        (row, coordinate) pair
    """
    values = np.asarray(values, dtype=float)
    n_rows, n_particles, n_coords = values.shape
    order = np.argsort(values, axis=1, kind="stable")
    sorted_values = np.take_along_axis(values, order, axis=1)
    sorted_weights = np.take_along_axis(
        np.broadcast_to(weights[:, :, None], values.shape), order, axis=1
    )
    cum = np.cumsum(sorted_weights, axis=1)
    slack = QUANTILE_RTOL * cum[:, -1:, :]
    out = np.empty((n_rows, len(probs), n_coords))
    for i, p in enumerate(probs):
        # count of cumulative weights strictly below p == searchsorted(side="left")
        j = np.minimum((cum < p - slack).sum(axis=1), n_particles - 1)
        out[:, i, :] = np.take_along_axis(sorted_values, j[:, None, :], axis=1)[:, 0, :]
    return out
