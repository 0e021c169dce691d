import numpy as np
import pytest

from kpzlab.initial_data import (
    ConditionedBridgeConfig,
    TARGETS,
    TubeTooUnlikelyError,
    decompose_initial,
    get_target,
    sample_bridge,
    sample_conditioned_bridge,
    sample_conditioned_bridges,
    uniform_distance,
)
from kpzlab.spectral import GridField, field_allclose, to_grid


class TestTargets:
    def test_pinned_at_zero(self):
        for name, target in TARGETS.items():
            assert abs(target(np.zeros(1))[0]) < 1e-14, name

    def test_battery_bounded(self):
        x = np.linspace(0, 1, 4097)[:-1]
        for name, target in TARGETS.items():
            assert np.max(np.abs(target(x))) < 1.0, name

    def test_truncation_error_decreasing(self):
        # uniform convergence of the Fourier truncation on the battery
        for name in ("sine", "triangle", "weierstrass"):
            target = get_target(name)
            errs = [target.sup_truncation_error(n) for n in (8, 16, 32, 64)]
            assert all(a >= b - 1e-12 for a, b in zip(errs, errs[1:])), (name, errs)

    def test_sine_band_limited(self):
        target = get_target("sine")
        assert target.sup_truncation_error(8) < 1e-12


class TestSampleBridge:
    def test_pinned_and_real(self, rng):
        b = sample_bridge(16, rng)
        x = np.arange(256) / 256
        emat = np.exp(2j * np.pi * np.outer(b.wavenumbers(), x))
        vals = b.coeffs @ emat
        assert abs(vals[0]) < 1e-12  # b(0) = 0 by the zero-mode shift
        assert np.max(np.abs(vals.imag)) < 1e-10  # real path

    def test_mode_variances(self, rng):
        # coefficient k has second moment (2 pi k)^-2
        draws = 20_000
        k = 16
        coeffs = np.array([sample_bridge(k, rng).half()[1:] for _ in range(500)])
        # 500 objects is slow enough; use the batch sampler for the rest
        from kpzlab.initial_data import _draw_bridge_coeffs

        coeffs = _draw_bridge_coeffs(k, draws, rng)
        second = np.mean(np.abs(coeffs) ** 2, axis=0)
        expect = (2 * np.pi * np.arange(1, k + 1)) ** -2.0
        # 3 sigma band: sd of |c|^2 estimate is expect/sqrt(draws)
        assert np.all(np.abs(second - expect) < 3.5 * expect / np.sqrt(draws))

    def test_pointwise_variance_is_bridge_variance(self, rng):
        # Var b(x) = x(1-x) for the pinned bridge (truncation-limited)
        draws, k, m = 40_000, 64, 256
        from kpzlab.initial_data import _draw_bridge_coeffs
        from kpzlab.spectral import synthesize

        coeffs = _draw_bridge_coeffs(k, draws, rng)
        half = np.zeros((draws, k + 1), dtype=complex)
        half[:, 1:] = coeffs
        vals = synthesize(half, m)
        vals -= vals[:, :1]
        x = np.arange(m) / m
        var = np.var(vals, axis=0)
        expect = x * (1 - x)
        assert np.max(np.abs(var - expect)) < 0.02

    def test_rejects_bad_cutoff(self, rng):
        with pytest.raises(ValueError):
            sample_bridge(0, rng)


class TestConditionedBridge:
    def test_wide_tube_accepts_immediately(self, rng):
        cfg = ConditionedBridgeConfig(eps=10.0, target=get_target("zero"), bridge_cutoff=8)
        fields, acc = sample_conditioned_bridges(cfg, 500, rng)
        assert acc > 0.99

    def test_accepted_samples_inside_tube(self, rng):
        target = get_target("sine")
        cfg = ConditionedBridgeConfig(eps=0.5, target=target, bridge_cutoff=8)
        fields, acc = sample_conditioned_bridges(cfg, 50, rng)
        m = cfg.check_grid
        x = np.arange(m) / m
        tv = target(x)
        for f in fields:
            vals = to_grid(f, m).values
            assert np.max(np.abs(vals - tv)) <= cfg.eps + 1e-12

    def test_acceptance_monotone_in_eps(self, rng):
        target = get_target("zero")
        rates = []
        for eps in (0.5, 1.0, 2.0):
            cfg = ConditionedBridgeConfig(eps=eps, target=target, bridge_cutoff=8)
            _, acc = sample_conditioned_bridges(cfg, 400, rng)
            rates.append(acc)
        assert rates[0] < rates[1] < rates[2]

    def test_single_sample_api(self, rng):
        cfg = ConditionedBridgeConfig(eps=1.0, target=get_target("zero"), bridge_cutoff=6)
        s = sample_conditioned_bridge(cfg, rng)
        assert s.attempts >= 1
        assert 0 < s.acceptance_estimate <= 1

    def test_unlikely_tube_raises_with_estimate(self, rng):
        cfg = ConditionedBridgeConfig(
            eps=0.01, target=get_target("sine"), bridge_cutoff=8, max_attempts=2000
        )
        with pytest.raises(TubeTooUnlikelyError) as err:
            sample_conditioned_bridge(cfg, rng)
        assert err.value.attempts == 2000
        assert err.value.acceptance_estimate < 1e-3

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ConditionedBridgeConfig(eps=-1.0, target=get_target("zero"), bridge_cutoff=8)
        with pytest.raises(ValueError):
            ConditionedBridgeConfig(eps=1.0, target=get_target("zero"), bridge_cutoff=0)
        cfg = ConditionedBridgeConfig(eps=1.0, target=get_target("zero"), bridge_cutoff=12)
        assert cfg.check_grid >= 8 * 12


class TestDecomposeInitial:
    def test_degenerate_bridge_gives_zero_residual(self, rng):
        target = get_target("sine")
        n = 8
        pair = decompose_initial(target, target.spectral(n), n)
        assert np.max(np.abs(pair.h2_init.coeffs)) < 1e-14

    def test_sum_identity_exact(self, rng):
        target = get_target("triangle")
        n = 16
        bridge = sample_bridge(n, rng)
        pair = decompose_initial(target, bridge, n)
        total = pair.h1_init.coeffs + pair.h2_init.coeffs
        expect = target.spectral(n).coeffs
        assert np.max(np.abs(total - expect)) < 1e-14

    def test_residual_bounded_by_tube_plus_truncation(self, rng):
        target = get_target("triangle")
        n, eps = 16, 0.5
        cfg = ConditionedBridgeConfig(eps=eps, target=target, bridge_cutoff=n)
        fields, _ = sample_conditioned_bridges(cfg, 20, rng)
        o_n = target.sup_truncation_error(n)
        m = cfg.check_grid
        for f in fields:
            pair = decompose_initial(target, f, n)
            sup = np.max(np.abs(to_grid(pair.h2_init, m).values))
            assert sup <= eps + 2 * o_n + 1e-9

    def test_bridge_coarser_than_cutoff_padded(self, rng):
        target = get_target("sine")
        bridge = sample_bridge(4, rng)
        pair = decompose_initial(target, bridge, 8)
        assert pair.h1_init.cutoff == 8
        assert field_allclose(bridge, pair.h1_init)


class TestUniformDistance:
    def test_identical(self):
        g = GridField(np.linspace(0, 1, 16))
        assert uniform_distance(g, g) == 0.0

    def test_constant_shift(self):
        g = GridField(np.linspace(0, 1, 16))
        h = GridField(np.linspace(0, 1, 16) + 0.25)
        assert uniform_distance(g, h) == pytest.approx(0.25)

    def test_matches_loop_oracle(self, rng):
        a = rng.standard_normal(33)
        b = rng.standard_normal(33)
        best = max(abs(x - y) for x, y in zip(a, b))
        assert uniform_distance(GridField(a), GridField(b)) == pytest.approx(best)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            uniform_distance(GridField(np.zeros(4)), GridField(np.zeros(5)))


def test_conditioned_mean_path_in_tube(rng):
    # among accepted samples the empirical mean path sits inside the tube
    target = get_target("sine")
    cfg = ConditionedBridgeConfig(eps=0.5, target=target, bridge_cutoff=8)
    fields, _ = sample_conditioned_bridges(cfg, 200, rng)
    m = cfg.check_grid
    mean_path = np.mean([to_grid(f, m).values for f in fields], axis=0)
    x = np.arange(m) / m
    assert np.max(np.abs(mean_path - target(x))) <= cfg.eps
