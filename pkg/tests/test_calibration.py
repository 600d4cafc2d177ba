import numpy as np
import pytest

from app.core.exceptions import DegenerateSetError, DomainError
from app.core.rng_factory import RandomStream
from app.engines.coverage import CredibleSet, credible_box, estimate_coverage
from app.engines.models import CalibrationState
from app.engines.orchestrator import gpc_sa_run, gpc_wp_run
from app.engines.reweighting import ParticleBank, ess_star, min_ess_star, reweight
from app.engines.sa_engine import StochasticApproximationEngine
from app.engines.stochastic_approximation import ETA_MAX, ETA_MIN, sa_next_eta
from app.engines.wp_engine import WeightedParticleEngine
from app.posteriors.base import WeightedParticleSet
from app.posteriors.linreg import LinearRegressionModel
from app.schemas.run_config import CalibrationConfig
from app.utils.bootstrap import make_plan
from app.utils.synthetic import sample_percentile
from app.utils.weights import normalize_log_weights

from tests.oracles import batch_means_se


def coverage_bank(make_pset, n_replicates=20, log_pseudolik=None):
    """
    Original data centred at 0; replicates 1..B-1 have boxes [-1, 1], the last
    one [1, 2]. Coverage of theta_hat = 0 is (B - 1) / B at every eta.
    """
    values = np.linspace(-1.0, 1.0, 10)
    psets = [make_pset(values, replicate=0)]
    for b in range(1, n_replicates):
        lq = log_pseudolik if (log_pseudolik is not None and b == 1) else None
        psets.append(make_pset(values, lq, replicate=b))
    psets.append(make_pset(np.linspace(1.0, 2.0, 10), replicate=n_replicates))
    return ParticleBank(psets)


class TestCredibleBox:
    def test_left_continuous_endpoints(self, make_pset):
        box = credible_box(make_pset(np.arange(1.0, 101.0)), 0.05, [0])
        assert box.lo[0] == 3.0
        assert box.hi[0] == 98.0
        assert box.level == pytest.approx(0.95)

    def test_identical_particles(self, make_pset):
        box = credible_box(make_pset(np.full(10, 2.5)), 0.1, [0])
        assert box.lo[0] == box.hi[0] == 2.5

    def test_uniform_weights_match_order_statistics(self, make_pset):
        rng = np.random.default_rng(3)
        values = rng.standard_normal(200)
        # alpha / 2 = 0.0525 falls strictly between cumulative weights k / 200
        box = credible_box(make_pset(values), 0.105, [0])
        ordered = np.sort(values)
        assert box.lo[0] == ordered[10]
        assert box.hi[0] == ordered[189]

    @pytest.mark.parametrize("n_particles", [400, 1000, 2000])
    def test_integer_tail_mass_selects_exact_rank(self, make_pset, n_particles):
        # alpha / 2 * M is an integer, so both endpoints sit on a cumulative-weight boundary
        values = np.random.default_rng(n_particles).standard_normal(n_particles)
        ordered = np.sort(values)
        box = credible_box(make_pset(values), 0.05, [0])
        assert box.lo[0] == ordered[n_particles // 40 - 1]
        assert box.hi[0] == ordered[n_particles - n_particles // 40 - 1]
        assert box.lo[0] == sample_percentile(values, 0.025)
        assert box.hi[0] == sample_percentile(values, 0.975)

    def test_override_weights(self, make_pset):
        pset = make_pset([0.0, 1.0, 2.0, 3.0])
        box = credible_box(pset, 0.5, [0], weights=np.array([0.7, 0.1, 0.1, 0.1]))
        assert box.lo[0] == 0.0
        assert box.hi[0] == 1.0

    def test_needs_two_particles(self, make_pset):
        with pytest.raises(DegenerateSetError):
            credible_box(make_pset([1.0]), 0.05, [0])

    def test_alpha_domain(self, make_pset):
        with pytest.raises(DomainError):
            credible_box(make_pset([1.0, 2.0]), 1.0, [0])


class TestEstimateCoverage:
    @staticmethod
    def box(lo, hi):
        return CredibleSet(coords=[0], lo=np.array([lo]), hi=np.array([hi]), level=0.95)

    def test_all_contain(self):
        assert estimate_coverage([0.0], [self.box(-1, 1), self.box(-2, 0.5)]) == 1.0

    def test_count(self):
        sets = [self.box(-1, 1), self.box(-1, 1), self.box(0.5, 1), self.box(-1, 1)]
        assert estimate_coverage([0.0], sets) == 0.75

    def test_boundary_is_covered(self):
        assert estimate_coverage([1.0], [self.box(-1, 1)]) == 1.0
        assert self.box(-1, 1).contains([-1.0])

    def test_every_coordinate_must_be_inside(self):
        box = CredibleSet(coords=[0, 1], lo=np.array([0.0, 0.0]), hi=np.array([1.0, 1.0]), level=0.9)
        assert estimate_coverage([0.5, 2.0], [box]) == 0.0


class TestSaNextEta:
    def test_first_step(self):
        eta, l = sa_next_eta(1.0, None, None, 1, 1.0, 0.05)
        assert eta == pytest.approx(1.05)
        assert l == 1

    def test_fixed_point(self):
        eta, _ = sa_next_eta(0.7, 0.6, 0.5, 3, 0.95, 0.05)
        assert eta == pytest.approx(0.7)

    def test_direction_change_increments_counter(self):
        eta, l = sa_next_eta(1.02, 1.05, 1.0, 1, 0.9, 0.05)
        assert l == 2
        assert eta == pytest.approx(1.02 + 2 ** -0.51 * (0.9 - 0.95))
        assert 2 ** -0.51 == pytest.approx(0.7022, abs=1e-4)

    def test_text_variant_requires_undercoverage(self):
        _, l_figure = sa_next_eta(1.02, 1.05, 1.0, 1, 1.0, 0.05, variant="figure")
        _, l_text = sa_next_eta(1.02, 1.05, 1.0, 1, 1.0, 0.05, variant="text")
        assert l_figure == 2
        assert l_text == 1

    def test_no_increment_without_history(self):
        _, l = sa_next_eta(1.02, 1.05, None, 4, 0.5, 0.05)
        assert l == 4

    def test_clamped(self):
        eta, _ = sa_next_eta(1e-4, None, None, 1, 0.0, 0.05)
        assert eta == ETA_MIN
        eta, _ = sa_next_eta(ETA_MAX, None, None, 1, 1.0, 0.05)
        assert eta == ETA_MAX

    def test_sa_engine_extends_trajectory(self):
        state = CalibrationState(run_id="t", method="sa", trajectory=[1.0])
        cfg = CalibrationConfig()
        eta = StochasticApproximationEngine().step(state, 1.0, cfg)
        assert eta == pytest.approx(1.05)
        assert state.trajectory == [1.0, eta]


class TestReweight:
    def test_identity(self, make_pset):
        pset = make_pset(np.arange(5.0), np.array([-3.0, -1.0, -2.0, -8.0, 0.0]))
        w, _ = normalize_log_weights(reweight(pset, 1.0))
        np.testing.assert_allclose(w, pset.weights, atol=1e-12)

    def test_two_particles(self, make_pset):
        pset = make_pset([0.0, 1.0], [0.0, np.log(4.0)], eta=1.0)
        w, _ = normalize_log_weights(reweight(pset, 1.5))
        np.testing.assert_allclose(w, [1 / 3, 2 / 3], atol=1e-12)

    def test_result_is_normalized_in_log_domain(self, make_pset):
        pset = make_pset([0.0, 1.0, 2.0], [-10.0, -20.0, -30.0])
        log_w = reweight(pset, 3.0)
        assert np.exp(log_w).sum() == pytest.approx(1.0, abs=1e-12)

    def test_rejects_nonpositive_eta(self, make_pset):
        with pytest.raises(DomainError):
            reweight(make_pset([0.0, 1.0]), 0.0)

    def test_composition_from_base_weights(self, make_pset):
        rng = np.random.default_rng(1)
        psets = [make_pset(rng.standard_normal(8), rng.standard_normal(8) * 5, replicate=b) for b in range(3)]
        bank = ParticleBank(psets)
        bank.log_weights_at(0.7)
        direct = bank.base_log_weights + (1.3 - 1.0) * bank.log_pseudolik
        np.testing.assert_array_equal(bank.log_weights_at(1.3), direct)

    def test_chained_reweighting_matches_direct(self, make_pset):
        pset = make_pset(np.arange(6.0), np.array([-1.0, -4.0, 0.5, -2.0, -3.0, 0.0]))
        step = WeightedParticleSet(
            particles=pset.particles,
            log_weights=reweight(pset, 1.4),
            log_pseudolik=pset.log_pseudolik,
            eta_at_simulation=1.4,
        )
        np.testing.assert_allclose(reweight(step, 0.8), reweight(pset, 0.8), atol=1e-12)

    def test_bank_requires_common_eta(self, make_pset):
        with pytest.raises(DomainError):
            ParticleBank([make_pset([0.0, 1.0], eta=1.0), make_pset([0.0, 1.0], eta=2.0)])

    @pytest.mark.slow
    @pytest.mark.parametrize("delta", [-0.1, 0.1])
    def test_matches_fresh_simulation(self, linreg_dataset, delta):
        model = LinearRegressionModel(linreg_dataset.n_features)
        view = linreg_dataset.full_view()
        eta_s, eta_new = 1.0, 1.0 + delta
        pset = model.simulate(eta_s, view, 8000, 500, RandomStream(41))
        w, _ = normalize_log_weights(reweight(pset, eta_new))
        assert ess_star(pset, eta_new) >= 0.5 * pset.n_particles
        fresh = model.simulate(eta_new, view, 8000, 500, RandomStream(43))

        reweighted_mean = w @ pset.particles
        # importance-sampling standard error, inflated by the chain's own autocorrelation
        centred = pset.particles - reweighted_mean
        is_se = np.sqrt(np.sum((w[:, None] * centred) ** 2, axis=0))
        naive_se = pset.particles.std(axis=0) / np.sqrt(pset.n_particles)
        inflation = np.maximum(batch_means_se(pset.particles) / naive_se, 1.0)
        combined = np.sqrt((is_se * inflation) ** 2 + batch_means_se(fresh.particles) ** 2)
        gap = np.abs(reweighted_mean - fresh.particles.mean(axis=0))
        assert np.all(gap <= 4.0 * combined + 1e-3)


class TestMinEssStar:
    def test_no_move_gives_m(self, make_pset):
        rng = np.random.default_rng(2)
        psets = [make_pset(rng.standard_normal(12), rng.standard_normal(12), replicate=b) for b in range(4)]
        assert min_ess_star(psets, 1.0, 1.0) == pytest.approx(12.0)

    def test_dominating_particle(self, make_pset):
        lq = np.zeros(10)
        lq[4] = 1000.0
        psets = [make_pset(np.arange(10.0)), make_pset(np.arange(10.0), lq, replicate=1),
                 make_pset(np.arange(10.0), replicate=2)]
        assert min_ess_star(psets, 1.5) == pytest.approx(1.0)

    def test_original_data_excluded(self, make_pset):
        lq = np.zeros(10)
        lq[4] = 1000.0
        psets = [make_pset(np.arange(10.0), lq), make_pset(np.arange(10.0), replicate=1)]
        assert min_ess_star(psets, 1.5) == pytest.approx(10.0)

    def test_matches_ratio_formula(self, make_pset):
        rng = np.random.default_rng(6)
        psets = [make_pset(rng.standard_normal(25), 3.0 * rng.standard_normal(25), replicate=b) for b in range(5)]
        eta_new = 1.35
        expected = []
        for pset in psets[1:]:
            big_w = np.exp(pset.log_weights + (eta_new - 1.0) * pset.log_pseudolik)
            expected.append(big_w.sum() ** 2 / np.sum(big_w ** 2))
        assert min_ess_star(psets, eta_new, 1.0) == pytest.approx(min(expected), rel=1e-10)

    def test_wrong_simulation_eta(self, make_pset):
        with pytest.raises(DomainError):
            min_ess_star([make_pset([0.0, 1.0]), make_pset([0.0, 1.0], replicate=1)], 1.2, 0.5)


class TestWeightedParticleInnerLoop:
    def test_immediate_acceptance(self, make_pset):
        bank = coverage_bank(make_pset)
        state = CalibrationState(run_id="t", method="wp", round=1, trajectory=[1.0])
        cfg = CalibrationConfig(n_draws=10)
        outcome = WeightedParticleEngine().inner(state, bank, 1.0, cfg, [0])
        assert outcome.accepted
        assert outcome.eta == pytest.approx(1.05)
        assert outcome.evaluation.c_hat == pytest.approx(0.95)
        assert len(state.inner_trace) == 1
        trial = state.inner_trace[0]
        assert trial.u == 1 and trial.accepted and trial.min_ess == pytest.approx(10.0)

    def test_degenerate_weights_hand_back(self, make_pset):
        lq = np.zeros(10)
        lq[3] = 1e4
        bank = coverage_bank(make_pset, log_pseudolik=lq)
        state = CalibrationState(run_id="t", method="wp", round=1, trajectory=[1.0])
        cfg = CalibrationConfig(n_draws=10)
        outcome = WeightedParticleEngine().inner(state, bank, 1.0, cfg, [0])
        assert not outcome.accepted
        assert outcome.eta == pytest.approx(1.05)
        assert state.inner_trace[0].min_ess == pytest.approx(1.0)
        assert state.trajectory == [1.0, outcome.eta]

    def test_keeps_searching_while_particles_suffice(self, make_pset):
        # coverage stays at 19/20 = 0.95 but the tolerance is unreachable
        bank = coverage_bank(make_pset)
        state = CalibrationState(run_id="t", method="wp", round=2, trajectory=[1.0])
        cfg = CalibrationConfig(n_draws=10, alpha=0.2, eps=0.01, max_inner=7)
        outcome = WeightedParticleEngine().inner(state, bank, 0.95, cfg, [0])
        assert not outcome.accepted
        assert [t.u for t in state.inner_trace] == list(range(1, 8))
        assert all(t.round == 2 for t in state.inner_trace)
        assert outcome.eta == state.inner_trace[-1].eta

    def test_counter_reset_flag(self, make_pset):
        bank = coverage_bank(make_pset)
        state = CalibrationState(run_id="t", method="wp", kesten_l=5, trajectory=[0.9, 1.1, 1.0])
        cfg = CalibrationConfig(n_draws=10, reset_kesten_each_round=True)
        WeightedParticleEngine().inner(state, bank, 1.0, cfg, [0])
        assert state.kesten_l == 1


class TestCalibrationRuns:
    def test_vacuous_tolerance_stops_at_once(self, small_linreg_dataset, fast_cfg):
        model = LinearRegressionModel(small_linreg_dataset.n_features)
        plan = make_plan(small_linreg_dataset.n_rows, 8, 13)
        cfg = fast_cfg.model_copy(update={"eps": 1.0, "eta0": 0.8})
        sa = gpc_sa_run(model, small_linreg_dataset, plan, cfg, RandomStream(5))
        wp = gpc_wp_run(model, small_linreg_dataset, plan, cfg, RandomStream(5))
        for result in (sa, wp):
            assert result.converged
            assert result.outer_iterations == 1
            assert result.eta_hat == 0.8
            assert result.total_sweeps == 9 * (60 + 20)
        assert sa.c_hat_history == wp.c_hat_history
        assert sa.box_lo == wp.box_lo and sa.point_estimate == wp.point_estimate
        assert sa.seeds == {"master_seed": 5, "plan_seed": 13}

    def test_budget_exhaustion_and_invariants(self, small_linreg_dataset, fast_cfg):
        model = LinearRegressionModel(small_linreg_dataset.n_features)
        n_replicates = 8
        plan = make_plan(small_linreg_dataset.n_rows, n_replicates, 2)
        cfg = fast_cfg.model_copy(update={"eps": 1e-9, "max_outer": 3, "eta0": 3.0})
        for run in (gpc_sa_run, gpc_wp_run):
            result = run(model, small_linreg_dataset, plan, cfg, RandomStream(9))
            assert not result.converged
            assert result.outer_iterations == 3
            assert result.eta_hat == result.eta_history[-1]
            etas = result.eta_history + [t.eta for t in result.inner_trace]
            assert all(ETA_MIN <= e <= ETA_MAX for e in etas)
            for c in result.c_hat_history:
                assert c * n_replicates == pytest.approx(round(c * n_replicates), abs=1e-12)
            counters = [r.kesten_l for r in result.rounds]
            assert counters == sorted(counters)
            assert len(result.box_lo) == len(model.coverage_coords)

    def test_result_serializes(self, small_linreg_dataset, fast_cfg):
        model = LinearRegressionModel(small_linreg_dataset.n_features)
        plan = make_plan(small_linreg_dataset.n_rows, 5, 1)
        result = gpc_wp_run(model, small_linreg_dataset, plan, fast_cfg.model_copy(update={"max_outer": 2}),
                            RandomStream(3))
        payload = result.model_dump(mode="json")
        for key in ("eta_hat", "converged", "outer_iterations", "inner_trace", "c_hat_history", "wall_ms", "seeds"):
            assert key in payload
        assert result.summary_line().startswith("eta_hat=")

    def test_same_result_for_any_worker_count(self, small_linreg_dataset, fast_cfg):
        model = LinearRegressionModel(small_linreg_dataset.n_features)
        plan = make_plan(small_linreg_dataset.n_rows, 6, 21)
        base = fast_cfg.model_copy(update={"max_outer": 2})
        one = gpc_wp_run(model, small_linreg_dataset, plan, base, RandomStream(4))
        two = gpc_wp_run(model, small_linreg_dataset, plan, base.model_copy(update={"workers": 2}), RandomStream(4))
        assert one.eta_history == two.eta_history
        assert one.c_hat_history == two.c_hat_history
        assert one.point_estimate == two.point_estimate
        assert [t.model_dump() for t in one.inner_trace] == [t.model_dump() for t in two.inner_trace]

    @pytest.mark.slow
    def test_accepted_rate_holds_under_fresh_simulation(self, linreg_dataset):
        model = LinearRegressionModel(linreg_dataset.n_features)
        n_replicates = 100
        plan = make_plan(linreg_dataset.n_rows, n_replicates, 31)
        cfg = CalibrationConfig()
        result = gpc_wp_run(model, linreg_dataset, plan, cfg, RandomStream(8))
        assert result.converged

        # new MCMC at eta_hat on every replicate, from streams the run never used
        fresh = RandomStream(9)
        psets = [
            model.simulate(result.eta_hat, view, cfg.n_draws, cfg.warmup, fresh.spawn(b), replicate=b)
            for b, view in enumerate(plan.views(linreg_dataset))
        ]
        c_hat = ParticleBank(psets).evaluate(result.eta_hat, cfg.alpha, model.coverage_coords).c_hat
        assert abs(c_hat - (1.0 - cfg.alpha)) < cfg.eps + 2.0 / n_replicates
