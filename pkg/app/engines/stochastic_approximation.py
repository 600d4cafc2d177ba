"""
Single stochastic-approximation step with Kesten's step-size rule.
"""
from typing import Optional, Sequence, Tuple

import numpy as np

ETA_MIN = 1e-4
ETA_MAX = 1e4
STEP_EXPONENT = 0.51


def direction_changed(eta_i: float, eta_prev: Optional[float], eta_prev2: Optional[float]) -> bool:
    """True when (eta_{i-1} - eta_{i-2}) (eta_i - eta_{i-1}) < 0; needs three iterates."""
    if eta_prev is None or eta_prev2 is None:
        return False
    return (eta_prev - eta_prev2) * (eta_i - eta_prev) < 0


def sa_next_eta(
    eta_i: float,
    eta_prev: Optional[float],
    eta_prev2: Optional[float],
    l: int,
    c_hat: float,
    alpha: float,
    variant: str = "figure",
) -> Tuple[float, int]:
    """
    eta_{i+1} = eta_i + l^-0.51 [c_hat - (1 - alpha)], clamped to [1e-4, 1e4].

    l increments when the trajectory changes direction. The "text" variant
    additionally requires c_hat < 1.

    Returns:
        (eta_{i+1}, l')
    """
    if l < 1:
        raise ValueError("Kesten counter must be >= 1")
    if direction_changed(eta_i, eta_prev, eta_prev2) and (variant == "figure" or c_hat < 1.0):
        l += 1
    step = l ** -STEP_EXPONENT
    eta_next = float(np.clip(eta_i + step * (c_hat - (1.0 - alpha)), ETA_MIN, ETA_MAX))
    return eta_next, l


def last_three(trajectory: Sequence[float]) -> Tuple[float, Optional[float], Optional[float]]:
    """(eta_i, eta_{i-1}, eta_{i-2}) from a visited-rate trajectory; missing entries are None."""
    eta_prev = trajectory[-2] if len(trajectory) >= 2 else None
    eta_prev2 = trajectory[-3] if len(trajectory) >= 3 else None
    return trajectory[-1], eta_prev, eta_prev2
