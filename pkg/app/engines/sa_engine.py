"""
Outer-loop update of GPC-SA: one stochastic-approximation step per MCMC round.
"""
import logging

from app.engines.models import CalibrationState
from app.engines.stochastic_approximation import last_three, sa_next_eta
from app.schemas.run_config import CalibrationConfig

logger = logging.getLogger(__name__)


class StochasticApproximationEngine:
    """Moves eta once per round from the coverage measured by fresh MCMC."""

    def step(self, state: CalibrationState, c_hat: float, cfg: CalibrationConfig) -> float:
        """
        Propose the learning rate for the next MCMC round.

        Extends state.trajectory and updates the Kesten counter in place.
        """
        eta_next, state.kesten_l = sa_next_eta(
            *last_three(state.trajectory),
            l=state.kesten_l,
            c_hat=c_hat,
            alpha=cfg.alpha,
            variant=cfg.kesten_variant,
        )
        state.trajectory.append(eta_next)
        logger.debug("sa step: eta %.6g -> %.6g (l=%d)", state.trajectory[-2], eta_next, state.kesten_l)
        return eta_next
