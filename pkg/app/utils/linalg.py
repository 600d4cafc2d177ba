"""
Small dense symmetric-positive-definite linear algebra.
"""
import numpy as np
from scipy.linalg import cho_solve, lapack

from app.core.exceptions import DomainError, FactorizationError

SYMMETRY_TOLERANCE = 1e-10


class SpdMatrix:
    """
    Dense symmetric positive definite matrix with its Cholesky factor.

    Construction fails with FactorizationError when the matrix is not SPD.
    """

    def __init__(self, values):
        a = np.array(values, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError(f"expected a square matrix, got shape {a.shape}")
        scale = max(1.0, float(np.abs(a).max(initial=0.0)))
        if not np.allclose(a, a.T, rtol=0.0, atol=SYMMETRY_TOLERANCE * scale):
            raise DomainError("matrix is not symmetric")
        self.values = a
        self.factor = cholesky_spd(a)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def solve(self, b) -> np.ndarray:
        return cho_solve((self.factor, True), np.asarray(b, dtype=float))


def cholesky_spd(a) -> np.ndarray:
    """
    Lower Cholesky factor L with L @ L.T == a.

    Raises:
        FactorizationError: naming the first non-positive pivot (1-based)
    """
    if isinstance(a, SpdMatrix):
        return a.factor
    a = np.asarray(a, dtype=float)
    if np.isnan(a).any():
        raise DomainError("matrix contains NaN")
    factor, info = lapack.dpotrf(a, lower=1, clean=1)
    if info > 0:
        raise FactorizationError(pivot=int(info))
    if info < 0:
        raise DomainError(f"illegal argument {-info} to dpotrf")
    return factor


def spd_solve(a, b) -> np.ndarray:
    """Solve a x = b for SPD a through its Cholesky factor."""
    factor = cholesky_spd(a)
    return cho_solve((factor, True), np.asarray(b, dtype=float))
