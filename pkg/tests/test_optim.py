import math

import numpy as np
import pytest

from ucr import (
    FitDivergenceError,
    FitTask,
    LossConfig,
    LossKind,
    ResolverConfig,
    ae2_histogram,
    boundary_demo,
    circular_distance,
    fit_encodings,
    initial_state,
    paired_bias_experiment,
    total_loss_gradient,
)


def make_task(**kw):
    defaults = dict(
        targets=tuple(np.linspace(-1.2, 1.2, 16)),
        noise_sigma=0.0,
        init_scale=1.0,
        steps=50,
        learning_rate=0.02,
        seed=0,
    )
    defaults.update(kw)
    return FitTask(**defaults)


class TestFitTask:
    @pytest.mark.parametrize(
        "field,value",
        [("steps", 0), ("learning_rate", 0.0), ("noise_sigma", -0.1), ("init_scale", 0.0), ("seed", -1)],
    )
    def test_validation(self, field, value):
        with pytest.raises(ValueError):
            make_task(**{field: value})


class TestCircularDistance:
    def test_zero(self):
        assert circular_distance(0.3, 0.3) == 0.0

    def test_wraparound(self):
        assert circular_distance(-math.pi / 2 + 0.01, math.pi / 2 - 0.01) == pytest.approx(
            0.02, abs=1e-12
        )

    def test_range(self):
        rng = np.random.default_rng(0)
        a = rng.uniform(-math.pi / 2, math.pi / 2, 1000)
        b = rng.uniform(-math.pi / 2, math.pi / 2, 1000)
        d = circular_distance(a, b)
        assert np.all(d >= 0) and np.all(d <= math.pi / 2 + 1e-15)


class TestInitialState:
    def test_deterministic_per_sample(self):
        task = make_task(noise_sigma=0.2)
        rcfg = ResolverConfig(3)
        m1, n1 = initial_state(task, rcfg)
        m2, n2 = initial_state(task, rcfg)
        np.testing.assert_array_equal(m1, m2)
        np.testing.assert_array_equal(n1, n2)

    def test_sample_streams_independent_of_count(self):
        # dropping trailing targets must not change earlier samples
        t_long = make_task(targets=tuple(np.linspace(-1, 1, 10)))
        t_short = make_task(targets=tuple(np.linspace(-1, 1, 10))[:4])
        rcfg = ResolverConfig(2)
        m_long, _ = initial_state(t_long, rcfg)
        m_short, _ = initial_state(t_short, rcfg)
        np.testing.assert_array_equal(m_long[:4], m_short)

    def test_inits_inside_disc(self):
        task = make_task(init_scale=2.5, targets=tuple(np.zeros(500)))
        m, _ = initial_state(task, ResolverConfig(4))
        assert np.all(np.linalg.norm(m, axis=1) <= 2.5)

    def test_noise_is_wrapped_gaussian(self):
        task = make_task(noise_sigma=0.3, targets=(math.pi / 2 - 1e-3,) * 100)
        _, noisy = initial_state(task, ResolverConfig(2))
        assert np.all(noisy >= -math.pi / 2) and np.all(noisy < math.pi / 2)
        assert np.std(noisy) > 0


class TestFitEncodings:
    def test_bitwise_determinism(self):
        task = make_task(noise_sigma=0.1, steps=80)
        rcfg = ResolverConfig(2)
        lcfg = LossConfig()
        r1 = fit_encodings(task, rcfg, lcfg)
        r2 = fit_encodings(task, rcfg, lcfg)
        np.testing.assert_array_equal(r1.ae2, r2.ae2)
        np.testing.assert_array_equal(r1.angle_error, r2.angle_error)
        np.testing.assert_array_equal(r1.loss_trajectory, r2.loss_trajectory)
        assert r1.ae2_quantiles == r2.ae2_quantiles

    def test_noiseless_constrained_regression_values(self):
        # frozen harness regression: full convergence in the ungated regime
        rng = np.random.default_rng(7)
        task = FitTask(
            targets=tuple(rng.uniform(-math.pi / 2, math.pi / 2, 200)),
            noise_sigma=0.0,
            init_scale=1.0,
            steps=500,
            learning_rate=0.02,
            seed=0,
        )
        report = fit_encodings(task, ResolverConfig(2), LossConfig(m_invalid=0.0))
        assert 0.9 <= report.ae2_quantiles[2] <= 1.1
        assert report.angle_error_quantiles[2] < 0.01

    def test_noiseless_unconstrained_also_converges(self):
        # with benign init and no gate the constraint is unnecessary
        rng = np.random.default_rng(7)
        task = FitTask(
            targets=tuple(rng.uniform(-math.pi / 2, math.pi / 2, 100)),
            noise_sigma=0.0,
            init_scale=1.0,
            steps=500,
            learning_rate=0.02,
            seed=1,
        )
        report = fit_encodings(task, ResolverConfig(2), LossConfig(lambda_uc=0.0, m_invalid=0.0))
        assert report.angle_error_quantiles[2] < 0.01

    def test_gate_engagement_at_step_zero(self):
        task = make_task(init_scale=0.8, targets=tuple(np.linspace(-1, 1, 64)))
        rcfg = ResolverConfig(2)
        lcfg = LossConfig()
        m0, noisy = initial_state(task, rcfg)
        gated = (m0 * m0).sum(axis=1) < lcfg.m_invalid
        assert gated.any() and (~gated).any()
        reg_only = LossConfig(lambda_uc=0.0, m_invalid=lcfg.m_invalid)
        g = total_loss_gradient(m0, noisy, rcfg, reg_only)
        np.testing.assert_array_equal(g[gated], 0.0)
        assert np.all(np.abs(g[~gated]).sum(axis=1) > 0)

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")  # overflow is the point
    def test_divergence_raises_with_step(self):
        task = make_task(
            steps=200,
            learning_rate=50.0,
            init_scale=3.0,
            targets=tuple(np.linspace(-1, 1, 8)),
        )
        lcfg = LossConfig(uc_loss_kind=LossKind.SQUARED_DEVIATION, lambda_uc=1.0)
        with pytest.raises(FitDivergenceError) as err:
            fit_encodings(task, ResolverConfig(2), lcfg)
        assert 0 <= err.value.step < 200

    def test_empty_targets(self):
        task = make_task(targets=())
        report = fit_encodings(task, ResolverConfig(2), LossConfig())
        assert report.ae2.size == 0
        assert math.isnan(report.ae2_quantiles[1])

    @pytest.mark.parametrize(
        "n,kind,lr,steps",
        [
            # L1 flow contracts geometrically, then hops inside a band whose
            # width is 4 * lambda_uc * lr * target, kept under 1e-3 by lr
            (2, LossKind.ABSOLUTE_DEVIATION, 1.2e-4, 8_000),
            # squared flow is smooth; the n=3 plane constraint is captured
            # exponentially fast, inside the burn-in allowance
            (3, LossKind.SQUARED_DEVIATION, 0.01, 4_000),
        ],
    )
    def test_pure_constraint_flow_converges_monotonically(self, n, kind, lr, steps):
        # lambda_reg = 0: every trajectory's sum-of-squares approaches the
        # circle target and stays within 1e-3, monotone after 10% burn-in
        rcfg = ResolverConfig(n)
        task = make_task(
            targets=tuple(np.linspace(-1.2, 1.2, 12)),
            steps=steps,
            learning_rate=lr,
            seed=1,
        )
        traj = np.empty((task.steps, 12))

        def record(step, m):
            traj[step] = (m * m).sum(axis=1)

        report = fit_encodings(
            task,
            rcfg,
            LossConfig(lambda_reg=0.0, lambda_uc=1.0, uc_loss_kind=kind),
            on_step=record,
        )
        target = rcfg.circle_radius_sq
        assert np.abs(report.ae2 - target).max() < 1e-3
        dev = np.abs(traj - target)
        burn = task.steps // 10
        ceiling = np.maximum(dev[burn:-1], 1e-3)
        assert np.all(dev[burn + 1 :] <= ceiling)

    def test_adversarial_paired_p90_sign_test(self):
        # with far init and noisy targets, the unconstrained twin drifts
        # further off-circle at the 90th percentile in every repetition
        result = paired_bias_experiment(
            ResolverConfig(2),
            LossConfig(),
            repetitions=20,
            samples=128,
            noise_sigma=0.3,
            init_scale=3.0,
            steps=150,
            learning_rate=0.1,
            seed=0,
        )
        wins = 0
        for base, cons in zip(result.baseline_reports, result.constrained_reports):
            b = np.quantile(np.abs(base.ae2 - 1.0), 0.9)
            c = np.quantile(np.abs(cons.ae2 - 1.0), 0.9)
            wins += c < b
        assert wins >= 15


class TestBoundaryDemo:
    def test_row_values_1d(self):
        ((eps, loss_1d, gap),) = boundary_demo([1e-3], ResolverConfig(1))
        assert loss_1d == pytest.approx(math.pi - 2e-3, abs=1e-12)
        assert gap == loss_1d

    def test_row_values_2d(self):
        ((_, _, gap),) = boundary_demo([1e-3], ResolverConfig(2))
        assert gap == pytest.approx(2 * math.sin(2e-3), abs=1e-12)
        assert gap == pytest.approx(4e-3, abs=1e-5)

    def test_monotone_table(self):
        epsilons = [10.0**-k for k in range(1, 7)]
        rows = boundary_demo(epsilons, ResolverConfig(2))
        loss_1d = [r[1] for r in rows]
        gaps = [r[2] for r in rows]
        assert all(b > a for a, b in zip(loss_1d, loss_1d[1:]))
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert loss_1d[-1] == pytest.approx(math.pi, abs=1e-5)

    def test_bad_epsilon(self):
        with pytest.raises(ValueError):
            boundary_demo([0.0], ResolverConfig(2))


class TestAe2Histogram:
    def _report(self, values):
        values = np.asarray(values, dtype=float)
        task_like = fit_encodings(
            make_task(targets=tuple(np.zeros(1)), steps=1), ResolverConfig(2), LossConfig()
        )
        return type(task_like)(
            ae2=values,
            angle_error=np.zeros_like(values),
            loss_trajectory=np.empty(0),
            ae2_quantiles=(0.0, 0.0, 0.0),
            angle_error_quantiles=(0.0, 0.0, 0.0),
        )

    def test_on_circle_single_bin(self):
        counts, edges = ae2_histogram(self._report(np.ones(40)), 10)
        assert counts.sum() == 40
        occupied = np.nonzero(counts)[0]
        assert occupied.tolist() == [9]
        assert edges[9] <= 1.0 <= edges[10]

    def test_empty_report(self):
        counts, edges = ae2_histogram(self._report([]), 7)
        assert counts.tolist() == [0] * 7
        assert edges[0] == 0.0 and edges[-1] == 1.0

    def test_counts_sum_to_samples(self):
        rng = np.random.default_rng(2)
        values = rng.uniform(0, 5, 333)
        counts, _ = ae2_histogram(self._report(values), 13)
        assert counts.sum() == 333

    def test_bad_bins(self):
        with pytest.raises(ValueError):
            ae2_histogram(self._report([1.0]), 0)
