import os
from pathlib import Path

import numpy as np
import pytest

from app.core.rng_factory import RandomStream
from app.posteriors.base import WeightedParticleSet
from app.posteriors.dataset import Dataset
from app.schemas.experiment import SynthConfig
from app.schemas.run_config import CalibrationConfig
from app.utils.synthetic import gen_linreg_data

SAHEART_DEFAULT = Path(__file__).resolve().parent.parent / "data" / "saheart.csv"


@pytest.fixture
def stream():
    return RandomStream(12345)


@pytest.fixture
def linreg_dataset():
    return gen_linreg_data(SynthConfig(n_rows=100, seed=7))


@pytest.fixture
def small_linreg_dataset():
    return gen_linreg_data(SynthConfig(n_rows=30, seed=11))


@pytest.fixture
def toy_svm_dataset():
    """30 points, two covariates, labels from a noisy linear rule."""
    rng = np.random.default_rng(2024)
    x = rng.standard_normal((30, 2))
    score = 0.5 + 1.5 * x[:, 0] - x[:, 1] + 0.8 * rng.standard_normal(30)
    y = np.where(score > 0, 1.0, -1.0)
    return Dataset.from_covariates(y, x, classification=True)


@pytest.fixture
def fast_cfg():
    """Tiny calibration settings for engine plumbing tests (in-process map)."""
    return CalibrationConfig(n_draws=60, warmup=20, max_outer=4, max_inner=20, workers=1)


@pytest.fixture
def saheart_path():
    path = Path(os.environ.get("GPC_SAHEART_PATH", SAHEART_DEFAULT))
    if not path.exists():
        pytest.skip(f"heart disease data not available at {path}")
    return path


@pytest.fixture
def make_pset():
    """Factory: particle set over one coordinate with uniform weights."""
    def _make(values, log_pseudolik=None, eta=1.0, replicate=0):
        values = np.asarray(values, dtype=float).reshape(-1, 1)
        lq = np.zeros(values.shape[0]) if log_pseudolik is None else np.asarray(log_pseudolik, dtype=float)
        return WeightedParticleSet.from_draws(values, lq, eta, replicate)
    return _make
