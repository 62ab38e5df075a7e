import numpy as np
import pytest
from scipy import stats

from leontief.errors import PreconditionViolated
from leontief.games import check_eps_nash, relative_nash_delta
from leontief.reduction import reduce_game_to_economy
from leontief.smoothed import (
    CSV_COLUMNS,
    ExperimentConfig,
    PerturbationModel,
    PipelineFailure,
    TrialRecord,
    approximate_nash_from_smoothed_leontief,
    child_seed,
    fit_transfer_constant,
    open_unit,
    perturb_economy,
    philox,
    random_game,
    records_from_csv,
    records_to_csv,
    run_experiment,
    seed_from_env,
    sigma_schedule,
    summarize,
)
from leontief.solvers import ExactSolver, GridSolver


class TestPerturb:
    def test_sigma_zero_is_identity(self, coordination):
        red = reduce_game_to_economy(coordination)
        assert perturb_economy(red, PerturbationModel("uniform", 0.0), 5) is red

    def test_uniform_ranges(self, coordination):
        red = reduce_game_to_economy(coordination)
        for seed in range(20):
            pert = perturb_economy(red, PerturbationModel("uniform", 0.05), seed)
            assert pert.sigma == 0.05
            assert pert.block_ranges_ok()

    def test_seed_determinism(self, coordination):
        red = reduce_game_to_economy(coordination)
        a = perturb_economy(red, PerturbationModel("uniform", 0.01), 3)
        b = perturb_economy(red, PerturbationModel("uniform", 0.01), 3)
        c = perturb_economy(red, PerturbationModel("uniform", 0.01), 4)
        np.testing.assert_array_equal(a.econ.D, b.econ.D)
        assert not np.array_equal(a.econ.D, c.econ.D)

    def test_gaussian_nonnegative(self, coordination):
        red = reduce_game_to_economy(coordination)
        for seed in range(10):
            pert = perturb_economy(red, PerturbationModel("gaussian", 0.5), seed)
            assert np.all(pert.econ.E >= 0) and np.all(pert.econ.D >= 0)

    def test_rejects_double_perturbation(self, coordination):
        red = reduce_game_to_economy(coordination)
        pert = perturb_economy(red, PerturbationModel("uniform", 0.01), 1)
        with pytest.raises(PreconditionViolated):
            perturb_economy(pert, PerturbationModel("uniform", 0.01), 1)

    def test_rejects_large_sigma(self, coordination):
        with pytest.raises(PreconditionViolated):
            perturb_economy(reduce_game_to_economy(coordination), PerturbationModel("uniform", 1.0), 1)

    def test_bad_model(self):
        with pytest.raises(ValueError):
            PerturbationModel("laplace", 0.1)
        with pytest.raises(ValueError):
            PerturbationModel("uniform", -0.1)

    def test_zero_fraction_and_distribution(self, all_ones):
        sigma = 0.01
        red = reduce_game_to_economy(all_ones)
        zs = []
        seed = 0
        while sum(len(z) for z in zs) < 10_000:
            pert = perturb_economy(red, PerturbationModel("uniform", sigma), seed)
            zs.append(np.concatenate([pert.Z.ravel(), pert.N.ravel()]))
            seed += 1
        z = np.concatenate(zs)[:10_000]
        assert abs(np.mean(z == 0) - 0.5) <= 0.02
        pos = z[z > 0] / sigma
        assert stats.kstest(pos, "uniform").pvalue > 0.01


def test_open_unit_strictly_inside():
    v = open_unit(philox(0), 100_000)
    assert v.min() > 0 and v.max() < 1
    assert stats.kstest(v, "uniform").pvalue > 0.01


def test_sigma_schedule():
    assert sigma_schedule(0.1, 2) == pytest.approx(0.1 / 8)
    assert sigma_schedule(0.1, 2, c_sigma=10) == pytest.approx(0.1 / 80)


class TestPipeline:
    def test_exact_solver_at_zero_sigma(self, coordination):
        prof, rec = approximate_nash_from_smoothed_leontief(coordination, 0.1, ExactSolver(), sigma=0)
        assert check_eps_nash(coordination, prof, 1e-8).passed
        assert rec.nash_delta <= 1e-8
        assert rec.prop_violations == 0

    def test_all_ones(self, all_ones):
        prof, rec = approximate_nash_from_smoothed_leontief(
            all_ones, 0.1, GridSolver(64, 0.01), seed=3
        )
        assert rec.nash_delta == pytest.approx(0, abs=1e-12)
        assert rec.sigma == pytest.approx(0.1 / 8)
        assert rec.time_ms is None

    def test_same_seed_same_record(self, coordination):
        runs = [
            approximate_nash_from_smoothed_leontief(coordination, 0.1, GridSolver(32, 0.01), seed=7)[1]
            for _ in range(2)
        ]
        assert runs[0] == runs[1]

    def test_timing_optional(self, all_ones):
        _, rec = approximate_nash_from_smoothed_leontief(all_ones, 0.1, GridSolver(16, 0.05), timing=True)
        assert rec.time_ms is not None and rec.time_ms >= 0

    def test_failure_carries_record(self, coordination):
        with pytest.raises(PipelineFailure) as info:
            approximate_nash_from_smoothed_leontief(
                coordination, 0.1, GridSolver(2, 0.0, refine_iters=0), seed=1
            )
        assert info.value.record.nash_delta is None
        assert info.value.record.points_scanned > 0

    def test_eps_prime_range(self, coordination):
        with pytest.raises(ValueError):
            approximate_nash_from_smoothed_leontief(coordination, 0.0)

    def test_delta_within_bound(self):
        for s in range(5):
            g = random_game(2, s)
            prof, rec = approximate_nash_from_smoothed_leontief(g, 0.05, GridSolver(64, 1e-3), seed=s)
            assert rec.nash_delta == pytest.approx(relative_nash_delta(g, prof))
            assert rec.nash_delta <= rec.bound_delta


class TestExperiment:
    def test_single_record_matches_direct_call(self, coordination):
        cfg = ExperimentConfig(sigmas=(0.001,), trials=1, master_seed=9, game=coordination, resolution=32)
        (rec,) = run_experiment(cfg)
        _, direct = approximate_nash_from_smoothed_leontief(
            coordination, 0.1, cfg.solver(), child_seed(9, 0, 0), sigma=0.001
        )
        assert rec == direct

    def test_order_and_workers(self):
        cfg = ExperimentConfig(sigmas=(0.0, 1e-3), trials=3, master_seed=2, game_size=2, resolution=16, eps_target=0.05)
        serial = run_experiment(cfg)
        assert [r.sigma for r in serial] == [0.0] * 3 + [1e-3] * 3
        parallel = run_experiment(ExperimentConfig(**{**cfg.__dict__, "workers": 2}))
        assert serial == parallel

    def test_default_sigma(self):
        cfg = ExperimentConfig(eps_prime=0.08, game_size=2)
        assert cfg.resolved_sigmas() == (0.01,)

    def test_summary(self):
        cfg = ExperimentConfig(sigmas=(0.0, 1e-3), trials=4, master_seed=1, resolution=16, eps_target=0.05)
        recs = run_experiment(cfg)
        summ = summarize(recs)
        assert [s.sigma for s in summ] == [0.0, 1e-3]
        assert all(s.trials == 4 for s in summ)
        assert fit_transfer_constant(recs, 2) <= 10

    def test_perturbation_trend_on_all_ones(self, all_ones):
        # the all-ones game is solved exactly by any profile
        cfg = ExperimentConfig(sigmas=(0.0, 1e-4), trials=50, game=all_ones, resolution=8, eps_target=1e-3)
        recs = run_experiment(cfg)
        assert all(r.succeeded for r in recs)
        assert max(r.nash_delta for r in recs) <= 1e-12


class TestCsv:
    def test_round_trip(self):
        recs = [
            TrialRecord(0.1, 3, None, 10, 0.001, 0.0123456789012345, 0.5, 0),
            TrialRecord(1e-7, 2**63, 12.5, 7, None, None, None, None),
        ]
        text = records_to_csv(recs)
        assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
        assert records_from_csv(text) == recs

    def test_experiment_round_trip(self):
        recs = run_experiment(ExperimentConfig(sigmas=(1e-3,), trials=3, resolution=16, eps_target=0.05))
        assert records_from_csv(records_to_csv(recs)) == recs


def test_seed_from_env(monkeypatch):
    monkeypatch.delenv("LEONTIEF_SEED", raising=False)
    assert seed_from_env(4) == 4
    monkeypatch.setenv("LEONTIEF_SEED", "17")
    assert seed_from_env() == 17


def test_random_game_range():
    g = random_game(3, 0)
    assert g.A.min() >= 1 and g.B.max() <= 2
    np.testing.assert_array_equal(g.A, random_game(3, 0).A)
