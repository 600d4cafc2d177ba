"""
Inner loop of GPC-WP.

After an MCMC round at eta_s the particles are reweighted to a sequence of
trial rates proposed by the stochastic-approximation step. The loop stops
when a trial is calibrated with enough effective particles (accepted), or when
the weights have degenerated and fresh MCMC is needed at the trial rate.
"""
import logging
from typing import NamedTuple, Optional, Sequence

from app.engines.coverage import Evaluation
from app.engines.models import CalibrationState
from app.engines.reweighting import ParticleBank
from app.engines.stochastic_approximation import last_three, sa_next_eta
from app.schemas.calibration import InnerTrial
from app.schemas.run_config import CalibrationConfig
from app.utils.weights import ess_rows

logger = logging.getLogger(__name__)


class InnerOutcome(NamedTuple):
    eta: float
    accepted: bool
    evaluation: Optional[Evaluation] = None  # set when accepted


class WeightedParticleEngine:
    """Reweighting-based search between MCMC rounds."""

    def inner(
        self,
        state: CalibrationState,
        bank: ParticleBank,
        c_hat: float,
        cfg: CalibrationConfig,
        coverage_coords: Sequence[int],
    ) -> InnerOutcome:
        """
        Run trials u = 1, 2, ... from the round's particles.

        Args:
            state: run state; its trajectory ends at bank.eta_s
            bank: particles simulated at eta_s with uniform weights
            c_hat: coverage measured at eta_s
            cfg: calibration settings (alpha, eps, ess threshold, budgets)
            coverage_coords: parameter indices entering the credible boxes

        Returns:
            InnerOutcome(eta_hat, accepted=True, evaluation) on acceptance,
            otherwise InnerOutcome(eta_next, accepted=False) handing the last
            trial rate back to the outer loop
        """
        target = 1.0 - cfg.alpha
        threshold = cfg.ess_threshold

        if cfg.reset_kesten_each_round:
            trajectory = [bank.eta_s]
            l = 1
        else:
            trajectory = state.trajectory
            l = state.kesten_l

        eta_trial = bank.eta_s
        for u in range(1, cfg.max_inner + 1):
            eta_trial, l = sa_next_eta(
                *last_three(trajectory),
                l=l,
                c_hat=c_hat,
                alpha=cfg.alpha,
                variant=cfg.kesten_variant,
            )
            trajectory.append(eta_trial)
            if trajectory is not state.trajectory:
                state.trajectory.append(eta_trial)
            state.kesten_l = l

            weights = bank.weights_at(eta_trial)
            ess = ess_rows(weights)
            min_ess = float(ess[1:].min())
            evaluation = bank.evaluate(eta_trial, cfg.alpha, coverage_coords, weights=weights)
            c_hat = evaluation.c_hat

            calibrated = abs(c_hat - target) < cfg.eps
            enough_particles = min_ess >= threshold
            trial = InnerTrial(
                round=state.round,
                u=u,
                eta=eta_trial,
                c_hat=c_hat,
                min_ess=min_ess,
                ess_original=float(ess[0]),
                accepted=calibrated and enough_particles,
            )
            state.inner_trace.append(trial)
            logger.debug(
                "round %d trial %d: eta'=%.6g c_hat=%.4f minESS*=%.1f",
                state.round, u, eta_trial, c_hat, min_ess,
            )

            if trial.accepted:
                return InnerOutcome(eta=eta_trial, accepted=True, evaluation=evaluation)
            if not enough_particles:
                return InnerOutcome(eta=eta_trial, accepted=False)

        logger.warning(
            "inner loop of round %d exhausted %d trials; resimulating at eta=%.6g",
            state.round, cfg.max_inner, eta_trial,
        )
        return InnerOutcome(eta=eta_trial, accepted=False)
