"""
Dataset ingestion from CSV files.

Two layouts are understood:
  - generic: a `y` column plus numeric covariate columns (what gen-data writes)
  - South African heart disease data: a `chd` 0/1 outcome, a `famhist`
    Present/Absent column and numeric risk factors
"""
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from app.core.exceptions import IngestionError
from app.posteriors.dataset import Dataset

logger = logging.getLogger(__name__)

SAHEART_ROWS = 462
SAHEART_OUTCOME = "chd"
SAHEART_FEATURES = ["sbp", "tobacco", "ldl", "famhist", "obesity", "alcohol", "age"]
FAMHIST_CODES = {"Present": 1.0, "Absent": 0.0}


def _read_csv(path: Union[str, Path]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, encoding="utf-8")
    except FileNotFoundError as e:
        raise IngestionError(f"dataset file not found: {path}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise IngestionError(f"could not parse {path}: {e}") from e
    # R exports carry an unnamed row-index column
    return frame.drop(columns=[c for c in frame.columns if c in ("row.names", "") or c.startswith("Unnamed:")])


def _missing(frame: pd.DataFrame, columns: Sequence[str]) -> List[str]:
    return [c for c in columns if c not in frame.columns]


def _as_signed(outcome: pd.Series, name: str) -> np.ndarray:
    """Binary 0/1 or -1/+1 outcome coded to -1/+1."""
    values = outcome.to_numpy(dtype=float)
    observed = set(np.unique(values).tolist())
    if observed <= {0.0, 1.0}:
        return 2.0 * values - 1.0
    if observed <= {-1.0, 1.0}:
        return values
    raise IngestionError(f"column {name!r} must be binary (0/1 or -1/+1), found {sorted(observed)}")


def load_saheart(
    path: Union[str, Path],
    feature_columns: Optional[Sequence[str]] = None,
    expected_rows: Optional[int] = SAHEART_ROWS,
) -> Dataset:
    """
    Load the heart disease data as a classification dataset.

    Args:
        path: CSV file
        feature_columns: covariates to keep (default: sbp, tobacco, ldl,
            famhist, obesity, alcohol, age)
        expected_rows: required row count; None disables the check

    Returns:
        Dataset with an intercept, the chosen covariates and chd coded -1/+1
    """
    features = list(feature_columns or SAHEART_FEATURES)
    frame = _read_csv(path)
    missing = _missing(frame, features + [SAHEART_OUTCOME])
    if missing:
        raise IngestionError(
            f"{path}: missing columns {missing}; expected {features + [SAHEART_OUTCOME]}"
        )
    if expected_rows is not None and len(frame) != expected_rows:
        raise IngestionError(f"{path}: expected {expected_rows} rows, found {len(frame)}")

    frame = frame.copy()
    if "famhist" in features and frame["famhist"].dtype == object:
        unknown = set(frame["famhist"].unique()) - set(FAMHIST_CODES)
        if unknown:
            raise IngestionError(f"{path}: famhist must be Present/Absent, found {sorted(unknown)}")
        frame["famhist"] = frame["famhist"].map(FAMHIST_CODES)

    try:
        covariates = frame[features].to_numpy(dtype=float)
    except ValueError as e:
        raise IngestionError(f"{path}: non-numeric covariates: {e}") from e
    y = _as_signed(frame[SAHEART_OUTCOME], SAHEART_OUTCOME)
    logger.info("loaded %s: N=%d, K=%d", path, covariates.shape[0], covariates.shape[1] + 1)
    return Dataset.from_covariates(y, covariates, features, classification=True)


def load_csv(path: Union[str, Path], classification: bool = False) -> Dataset:
    """
    Load a generic dataset: column `y` is the response, every other column a
    numeric covariate. Classification responses may be 0/1 or -1/+1.
    """
    frame = _read_csv(path)
    if "y" not in frame.columns:
        raise IngestionError(f"{path}: expected a 'y' response column, found {list(frame.columns)}")
    features = [c for c in frame.columns if c != "y"]
    if not features:
        raise IngestionError(f"{path}: no covariate columns besides 'y'")
    try:
        covariates = frame[features].to_numpy(dtype=float)
        y = _as_signed(frame["y"], "y") if classification else frame["y"].to_numpy(dtype=float)
    except ValueError as e:
        raise IngestionError(f"{path}: non-numeric values: {e}") from e
    if np.isnan(covariates).any() or np.isnan(y).any():
        raise IngestionError(f"{path}: missing values are not supported")
    return Dataset.from_covariates(y, covariates, features, classification=classification)


def load_dataset(path: Union[str, Path], model_kind: str) -> Dataset:
    """Detect the file layout and load it for the given model."""
    frame_columns = _read_csv(path).columns
    if SAHEART_OUTCOME in frame_columns and "y" not in frame_columns:
        return load_saheart(path)
    return load_csv(path, classification=(model_kind == "svm"))
