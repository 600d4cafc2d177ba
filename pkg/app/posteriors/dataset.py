"""
Dataset containers shared by all posterior models.
"""
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class Dataset(BaseModel):
    """
    Responses y (N,), covariates X (N, K) whose first column is the
    intercept, and feature scales (K,) with scales[0] == 1.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    y: np.ndarray
    X: np.ndarray
    scales: np.ndarray
    feature_names: List[str] = Field(default_factory=list)
    classification: bool = False

    @model_validator(mode="after")
    def _check_shapes(self) -> "Dataset":
        n, k = self.X.shape
        if self.y.shape != (n,):
            raise ValueError(f"y has shape {self.y.shape}, expected ({n},)")
        if self.scales.shape != (k,):
            raise ValueError(f"scales has shape {self.scales.shape}, expected ({k},)")
        if not n >= k >= 1:
            raise ValueError(f"need N >= K >= 1, got N={n}, K={k}")
        if np.isnan(self.X).any() or np.isnan(self.y).any():
            raise ValueError("dataset contains NaN entries")
        if not np.all(self.X[:, 0] == 1.0):
            raise ValueError("first covariate column must be the intercept")
        if self.classification and not np.all(np.isin(self.y, (-1.0, 1.0))):
            raise ValueError("classification responses must be -1 or +1")
        return self

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @classmethod
    def from_covariates(
        cls,
        y,
        covariates,
        names: Optional[List[str]] = None,
        classification: bool = False,
    ) -> "Dataset":
        """
        Build a dataset from raw covariates; the intercept column is synthesized.

        Scales are the sample standard deviations of the covariate columns,
        with 1 for the intercept.
        """
        covariates = np.asarray(covariates, dtype=float)
        if covariates.ndim == 1:
            covariates = covariates[:, None]
        n = covariates.shape[0]
        X = np.column_stack([np.ones(n), covariates])
        scales = np.ones(X.shape[1])
        if covariates.shape[1] and n > 1:
            scales[1:] = covariates.std(axis=0, ddof=1)
        names = list(names) if names is not None else [f"x{k}" for k in range(1, X.shape[1])]
        return cls(
            y=np.asarray(y, dtype=float),
            X=X,
            scales=scales,
            feature_names=["intercept"] + names,
            classification=classification,
        )

    def full_view(self) -> "DatasetView":
        return DatasetView(base=self, indices=np.arange(self.n_rows))


class DatasetView(BaseModel):
    """A bootstrap replicate: row indices (with repetition) into a base dataset."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    base: Dataset
    indices: np.ndarray

    @model_validator(mode="after")
    def _check_indices(self) -> "DatasetView":
        n = self.base.n_rows
        if self.indices.shape != (n,):
            raise ValueError(f"view must have {n} indices, got {self.indices.shape}")
        if self.indices.min() < 0 or self.indices.max() >= n:
            raise ValueError("view indices out of range")
        return self

    @property
    def X(self) -> np.ndarray:
        return self.base.X[self.indices]

    @property
    def y(self) -> np.ndarray:
        return self.base.y[self.indices]

    @property
    def n_rows(self) -> int:
        return self.indices.shape[0]
