from pydantic import BaseModel, Field
from typing import List, Optional, Literal, Dict


class InnerTrial(BaseModel):
    """One reweighting trial of the weighted-particle inner loop."""
    round: int  # outer round s the trial belongs to
    u: int
    eta: float
    c_hat: float
    min_ess: float
    ess_original: float  # ESS of replicate 0, monitored but not gated
    accepted: bool = False


class RoundLog(BaseModel):
    """One MCMC round of the outer loop."""
    round: int
    eta: float
    c_hat: float
    kesten_l: int
    sweeps: int
    degenerate_estimate: bool = False


class CalibrationResult(BaseModel):
    method: Literal["sa", "wp"]
    eta_hat: float
    converged: bool
    outer_iterations: int
    total_sweeps: int
    wall_ms: float
    final_c_hat: float
    alpha: float
    eps: float
    eta_history: List[float] = Field(default_factory=list)
    c_hat_history: List[float] = Field(default_factory=list)
    inner_trace: List[InnerTrial] = Field(default_factory=list)
    rounds: List[RoundLog] = Field(default_factory=list)
    seeds: Dict[str, int] = Field(default_factory=dict)
    coverage_coords: List[int] = Field(default_factory=list)
    # credible box of the original data at eta_hat, over coverage_coords
    box_lo: List[float] = Field(default_factory=list)
    box_hi: List[float] = Field(default_factory=list)
    point_estimate: Optional[List[float]] = None

    def summary_line(self) -> str:
        return f"eta_hat={self.eta_hat:.6g} converged={int(self.converged)} iters={self.outer_iterations}"
