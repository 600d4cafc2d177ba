"""
Calibration orchestrator - runs the outer generalized-posterior-calibration loop.
"""
import logging
import time
from typing import Optional

from app.core.exceptions import SimulationError
from app.core.rng_factory import SIMULATE, RandomStream
from app.engines.coverage import Evaluation
from app.engines.models import CalibrationState
from app.engines.reweighting import ParticleBank
from app.engines.sa_engine import StochasticApproximationEngine
from app.engines.wp_engine import WeightedParticleEngine
from app.posteriors.base import PosteriorModel, WeightedParticleSet
from app.posteriors.dataset import Dataset, DatasetView
from app.schemas.calibration import CalibrationResult, RoundLog
from app.schemas.run_config import CalibrationConfig
from app.services.state_manager import state_manager
from app.utils.bootstrap import BootstrapPlan
from app.utils.parallel import parallel_map

logger = logging.getLogger(__name__)


def _simulate_replicate(
    model: PosteriorModel,
    view: DatasetView,
    eta: float,
    n_draws: int,
    warmup: int,
    stream: RandomStream,
    replicate: int,
) -> WeightedParticleSet:
    """Worker task: MCMC for one replicate, failures tagged with the replicate index."""
    try:
        return model.simulate(eta, view, n_draws, warmup, stream, replicate=replicate)
    except Exception as e:
        raise SimulationError(replicate, e) from e


class CalibrationOrchestrator:
    """
    Coordinates one calibration run.

    Per outer round:
    1. Simulate every replicate at eta_s (parallel map)
    2. Evaluate theta_hat, credible boxes and c_hat
    3. Stop when |c_hat - (1 - alpha)| < eps
    4. Otherwise update eta: one SA step (sa) or the reweighting inner loop (wp)
    """

    def __init__(self, method: str = "sa"):
        if method not in ("sa", "wp"):
            raise ValueError(f"unknown calibration method {method!r}")
        self.method = method
        self.sa_engine = StochasticApproximationEngine()
        self.wp_engine = WeightedParticleEngine()

    def run(
        self,
        model: PosteriorModel,
        dataset: Dataset,
        plan: BootstrapPlan,
        cfg: CalibrationConfig,
        rng: RandomStream,
        run_id: Optional[str] = None,
    ) -> CalibrationResult:
        """
        Execute the outer loop until calibrated or out of MCMC rounds.

        Args:
            model: posterior model to calibrate
            dataset: original data
            plan: bootstrap plan over the dataset's rows
            cfg: calibration settings
            rng: root stream of the run; replicate b at round s draws from
                rng.spawn(b, SIMULATE, s)
            run_id: optional identifier for the state manager

        Returns:
            CalibrationResult; non-convergence is reported through
            converged=False, never raised
        """
        views = plan.views(dataset)
        state = state_manager.create_run(self.method, run_id)
        target = 1.0 - cfg.alpha
        coords = model.coverage_coords
        sweeps_per_round = len(views) * (cfg.n_draws + cfg.warmup)
        started = time.perf_counter()

        eta = cfg.eta0
        state.trajectory.append(eta)
        converged = False
        eta_hat = eta
        evaluation: Optional[Evaluation] = None

        try:
            while state.round < cfg.max_outer:
                state.round += 1

                # Step 1: fresh MCMC on every replicate
                bank = self._execute_simulation(model, views, eta, cfg, rng, state.round)
                state.sweeps += sweeps_per_round

                # Step 2: coverage at eta_s
                evaluation = self._execute_evaluation(state, bank, eta, cfg, coords)

                # Step 3: termination check
                if abs(evaluation.c_hat - target) < cfg.eps:
                    converged, eta_hat = True, eta
                    break

                # Step 4: update
                if self.method == "sa":
                    eta = self.sa_engine.step(state, evaluation.c_hat, cfg)
                    continue
                outcome = self.wp_engine.inner(state, bank, evaluation.c_hat, cfg, coords)
                if outcome.accepted:
                    converged, eta_hat, evaluation = True, outcome.eta, outcome.evaluation
                    state.eta_history.append(eta_hat)
                    state.c_hat_history.append(evaluation.c_hat)
                    break
                eta = outcome.eta
            else:
                # Budget exhausted: report the last simulated rate
                eta_hat = state.eta_history[-1]
                logger.warning(
                    "%s run %s not calibrated after %d rounds (last c_hat=%.4f)",
                    self.method, state.run_id, cfg.max_outer, state.c_hat_history[-1],
                )
            wall_ms = (time.perf_counter() - started) * 1000.0
            result = self._build_result(state, model, cfg, rng, plan, converged, eta_hat, evaluation, wall_ms)
        finally:
            state_manager.discard(state.run_id)

        if result.converged:
            assert abs(result.final_c_hat - target) < cfg.eps
        logger.info(
            "%s finished: eta_hat=%.6g converged=%d rounds=%d sweeps=%d wall=%.0fms",
            self.method, result.eta_hat, int(result.converged), result.outer_iterations,
            result.total_sweeps, wall_ms,
        )
        return result

    def _execute_simulation(
        self,
        model: PosteriorModel,
        views,
        eta: float,
        cfg: CalibrationConfig,
        rng: RandomStream,
        round_index: int,
    ) -> ParticleBank:
        """
        Step 1: simulate all B + 1 replicates at eta.
        """
        tasks = [
            (model, view, eta, cfg.n_draws, cfg.warmup, rng.spawn(b, SIMULATE, round_index), b)
            for b, view in enumerate(views)
        ]
        psets = parallel_map(_simulate_replicate, tasks, cfg.workers)
        return ParticleBank(psets)

    def _execute_evaluation(
        self,
        state: CalibrationState,
        bank: ParticleBank,
        eta: float,
        cfg: CalibrationConfig,
        coords,
    ) -> Evaluation:
        """
        Step 2: theta_hat from the original data, boxes and c_hat, round log.
        """
        evaluation = bank.evaluate(eta, cfg.alpha, coords)
        state.eta_history.append(eta)
        state.c_hat_history.append(evaluation.c_hat)
        state_manager.add_round(
            state.run_id,
            RoundLog(
                round=state.round,
                eta=eta,
                c_hat=evaluation.c_hat,
                kesten_l=state.kesten_l,
                sweeps=state.sweeps,
                degenerate_estimate=evaluation.degenerate,
            ),
        )
        logger.info(
            "%s round %d: eta=%.6g c_hat=%.4f sweeps=%d",
            self.method, state.round, eta, evaluation.c_hat, state.sweeps,
        )
        return evaluation

    def _build_result(
        self,
        state: CalibrationState,
        model: PosteriorModel,
        cfg: CalibrationConfig,
        rng: RandomStream,
        plan: BootstrapPlan,
        converged: bool,
        eta_hat: float,
        evaluation: Evaluation,
        wall_ms: float,
    ) -> CalibrationResult:
        return CalibrationResult(
            method=self.method,
            eta_hat=eta_hat,
            converged=converged,
            outer_iterations=state.round,
            total_sweeps=state.sweeps,
            wall_ms=wall_ms,
            final_c_hat=state.c_hat_history[-1],
            alpha=cfg.alpha,
            eps=cfg.eps,
            eta_history=list(state.eta_history),
            c_hat_history=list(state.c_hat_history),
            inner_trace=list(state.inner_trace),
            rounds=list(state.rounds),
            seeds={"master_seed": rng.master_seed, "plan_seed": plan.master_seed},
            coverage_coords=list(model.coverage_coords),
            box_lo=evaluation.box_lo.tolist(),
            box_hi=evaluation.box_hi.tolist(),
            point_estimate=evaluation.theta_hat.tolist(),
        )


def gpc_sa_run(
    model: PosteriorModel,
    dataset: Dataset,
    plan: BootstrapPlan,
    cfg: CalibrationConfig,
    rng: RandomStream,
) -> CalibrationResult:
    """Calibrate with one SA step per MCMC round."""
    return CalibrationOrchestrator("sa").run(model, dataset, plan, cfg, rng)


def gpc_wp_run(
    model: PosteriorModel,
    dataset: Dataset,
    plan: BootstrapPlan,
    cfg: CalibrationConfig,
    rng: RandomStream,
) -> CalibrationResult:
    """Calibrate with reweighting between MCMC rounds."""
    return CalibrationOrchestrator("wp").run(model, dataset, plan, cfg, rng)
