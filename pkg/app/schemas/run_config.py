from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Literal, Optional, Dict

ModelKind = Literal["linreg", "svm"]
MethodName = Literal["sa", "wp"]

# Desk-scale simulation sizes per model: (draws kept, warmup)
DESK_SCALE_DRAWS: Dict[str, tuple] = {
    "linreg": (1000, 500),
    "svm": (2000, 500),
}


class CalibrationConfig(BaseModel):
    """Settings consumed by the calibration engines."""
    alpha: float = Field(default=0.05, gt=0, lt=1, description="Credible level is 1 - alpha")
    eps: float = Field(default=0.005, gt=0, description="Termination tolerance on |c_hat - (1 - alpha)|")
    n_draws: int = Field(default=1000, ge=2, description="Posterior draws kept per replicate (M)")
    warmup: int = Field(default=500, ge=0, description="Discarded MCMC sweeps per replicate")
    eta0: float = Field(default=1.0, gt=0, description="Initial learning rate")
    max_outer: int = Field(default=50, ge=1, description="Budget of MCMC rounds")
    max_inner: int = Field(default=100, ge=1, description="Budget of reweighting trials per round (WP)")
    ess_frac: float = Field(default=0.25, gt=0, lt=1, description="minESS* threshold as a fraction of M")
    kesten_variant: Literal["figure", "text"] = Field(
        default="figure",
        description="'figure': count direction changes only; 'text': also require c_hat < 1"
    )
    reset_kesten_each_round: bool = Field(
        default=False,
        description="Reset the Kesten counter at the start of every WP inner loop"
    )
    workers: Optional[int] = Field(default=None, ge=1, description="Replicate-map workers")

    @property
    def ess_threshold(self) -> float:
        return self.ess_frac * self.n_draws


class RunConfig(BaseModel):
    """
    Full configuration of a CLI run.

    Field defaults are the published settings; draws / warmup default to the
    desk-scale sizes of the chosen model.
    """
    model_config = ConfigDict(extra="forbid")

    model: ModelKind = "linreg"
    method: Literal["sa", "wp", "both"] = "both"
    alpha: float = Field(default=0.05, gt=0, lt=1)
    eps: float = Field(default=0.005, gt=0)
    n_bootstrap: int = Field(default=100, ge=1, description="Bootstrap replicates B")
    n_draws: Optional[int] = Field(default=None, ge=2)
    warmup: Optional[int] = Field(default=None, ge=0)
    eta0: float = Field(default=1.0, gt=0)
    ess_frac: float = Field(default=0.25, gt=0, lt=1)
    seed: Optional[int] = Field(default=None, ge=0)
    max_outer: int = Field(default=50, ge=1)
    max_inner: int = Field(default=100, ge=1)
    kesten_variant: Literal["figure", "text"] = "figure"
    reset_kesten_each_round: bool = False
    workers: Optional[int] = Field(default=None, ge=1)
    out_dir: Optional[str] = None

    # Experiment-only settings
    n_rows: int = Field(default=100, ge=20, description="Synthetic sample size N")
    n_datasets: int = Field(default=50, ge=1, description="Synthetic datasets (linreg) or seeds (svm)")

    @model_validator(mode="after")
    def _fill_model_defaults(self) -> "RunConfig":
        draws, warmup = DESK_SCALE_DRAWS[self.model]
        if self.n_draws is None:
            self.n_draws = draws
        if self.warmup is None:
            self.warmup = warmup
        return self

    @property
    def methods(self) -> tuple:
        return ("sa", "wp") if self.method == "both" else (self.method,)

    def to_calibration_config(self) -> CalibrationConfig:
        return CalibrationConfig(
            alpha=self.alpha,
            eps=self.eps,
            n_draws=self.n_draws,
            warmup=self.warmup,
            eta0=self.eta0,
            max_outer=self.max_outer,
            max_inner=self.max_inner,
            ess_frac=self.ess_frac,
            kesten_variant=self.kesten_variant,
            reset_kesten_each_round=self.reset_kesten_each_round,
            workers=self.workers,
        )
