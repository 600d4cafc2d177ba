"""
Data models for calibration engine runs.
"""
from pydantic import BaseModel, Field
from typing import List, Literal

from app.schemas.calibration import InnerTrial, RoundLog


class CalibrationState(BaseModel):
    """Mutable state of one calibration run (outer round s, Kesten counter, traces)."""
    run_id: str
    method: Literal["sa", "wp"]
    round: int = 0
    kesten_l: int = 1
    sweeps: int = 0

    eta_history: List[float] = Field(default_factory=list)  # simulated learning rates
    c_hat_history: List[float] = Field(default_factory=list)
    trajectory: List[float] = Field(default_factory=list)  # every eta visited, trials included
    rounds: List[RoundLog] = Field(default_factory=list)
    inner_trace: List[InnerTrial] = Field(default_factory=list)
