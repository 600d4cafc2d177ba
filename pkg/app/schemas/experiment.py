from pydantic import BaseModel, Field, field_validator
from typing import List, Optional, Literal, Tuple

REPORT_COLUMNS = [
    "dataset_id", "method", "eta_hat", "converged", "outer_iterations",
    "wall_ms", "truth_covered", "seed",
]


class SynthConfig(BaseModel):
    """Heteroskedastic regression generator: error variance depends on x1's sample percentiles."""
    n_rows: int = Field(default=100, ge=20)
    beta_true: Tuple[float, ...] = (1.0, 1.0, 2.0, -1.0)
    variance_levels: Tuple[float, float, float] = (0.05, 0.25, 1.0)
    cut_points: Tuple[float, float] = (0.05, 0.95)
    seed: int = Field(default=0, ge=0)

    @field_validator("variance_levels")
    @classmethod
    def _levels_positive_increasing(cls, v):
        if any(level <= 0 for level in v) or any(b < a for a, b in zip(v, v[1:])):
            raise ValueError("variance levels must be positive and non-decreasing")
        return v

    @field_validator("cut_points")
    @classmethod
    def _cuts_ordered(cls, v):
        if not 0.0 <= v[0] < v[1] <= 1.0:
            raise ValueError("cut points must satisfy 0 <= lo < hi <= 1")
        return v


class ReportRow(BaseModel):
    dataset_id: int
    method: Literal["sa", "wp"]
    eta_hat: float
    converged: int
    outer_iterations: int
    wall_ms: float
    truth_covered: Optional[int] = None  # only defined when the truth is known
    seed: int


class ExperimentReport(BaseModel):
    model: Literal["linreg", "svm"]
    n_rows: int
    workers: int
    rows: List[ReportRow] = Field(default_factory=list)
    failures: List[str] = Field(default_factory=list)  # "<dataset_id>/<method>: <error>"
