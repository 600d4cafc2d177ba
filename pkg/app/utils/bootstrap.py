"""
Bootstrap replicates of a dataset, stored as index vectors.

Replicate 0 is the identity view of the original data; replicates 1..B are
uniform with-replacement resamples. Only (N, B, master_seed) is stored: the
index vectors are regenerated from per-replicate streams on demand.
"""
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.core.rng_factory import PLAN, RandomStream
from app.posteriors.dataset import Dataset, DatasetView


@lru_cache(maxsize=64)
def _index_vectors(n_rows: int, n_replicates: int, master_seed: int) -> Tuple[np.ndarray, ...]:
    root = RandomStream(master_seed)
    vectors = []
    for b in range(1, n_replicates + 1):
        idx = root.spawn(b, PLAN).integers(n_rows, n_rows)
        idx.setflags(write=False)
        vectors.append(idx)
    return tuple(vectors)


class BootstrapPlan(BaseModel):
    """B with-replacement index vectors of length N, reproducible from the seed."""
    model_config = ConfigDict(frozen=True)

    n_rows: int = Field(ge=1)
    n_replicates: int = Field(ge=1)
    master_seed: int = Field(ge=0)

    @property
    def index_vectors(self) -> Tuple[np.ndarray, ...]:
        """Vectors of replicates 1..B (replicate 0 is the identity)."""
        return _index_vectors(self.n_rows, self.n_replicates, self.master_seed)

    def views(self, dataset: Dataset) -> List[DatasetView]:
        """[identity view] + the B bootstrap views, B + 1 in total."""
        if dataset.n_rows != self.n_rows:
            raise ValueError(f"plan was made for N={self.n_rows}, dataset has N={dataset.n_rows}")
        return [dataset.full_view()] + [
            DatasetView(base=dataset, indices=idx) for idx in self.index_vectors
        ]

    def to_sidecar(self) -> dict:
        """JSON sidecar: seed and dimensions only."""
        return self.model_dump()

    @classmethod
    def from_sidecar(cls, payload: dict) -> "BootstrapPlan":
        return cls.model_validate(payload)


def make_plan(n_rows: int, n_replicates: int, master_seed: int) -> BootstrapPlan:
    """Create a plan; equal arguments give value-equal plans with identical vectors."""
    return BootstrapPlan(n_rows=n_rows, n_replicates=n_replicates, master_seed=master_seed)
