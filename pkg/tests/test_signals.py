import numpy as np
import pytest
from pydantic import ValidationError

from src.core.errors import NumericalBlowup
from src.signals.generators import (
    GeneratorOverrides,
    GeneratorSpec,
    SignalKind,
    gen_chirp,
    gen_multiscale,
    gen_noisy_sine,
    gen_sde,
    generate,
)


class TestSde:
    def test_length_includes_initial_value(self):
        series = gen_sde(1, n=100)
        assert series.n == 101
        assert series[0] == 0.5

    def test_zero_noise_from_origin_stays_put(self):
        assert not gen_sde(3, y0=0.0, noise_variance=0.0).values.any()

    def test_same_seed_same_path(self):
        assert np.array_equal(gen_sde(42).values, gen_sde(42).values)
        assert not np.array_equal(gen_sde(42).values, gen_sde(43).values)

    def test_stays_in_a_bounded_regime(self):
        # seeds 0..19: peaks 1.61..1.93 (median 1.76), 99.1% to 99.7% of
        # each path inside [-1.5, 1.5]
        paths = [gen_sde(seed).values for seed in range(20)]
        peaks = np.array([np.max(np.abs(path)) for path in paths])
        inside = np.array([np.mean(np.abs(path) <= 1.5) for path in paths])
        assert np.all(peaks < 2.0)
        assert np.median(peaks) <= 1.85
        assert np.all(inside >= 0.98)

    def test_blowup_is_reported(self):
        with pytest.raises(NumericalBlowup):
            gen_sde(0, n=50, dt=5.0, y0=3.0, noise_variance=0.0)

    def test_rejects_bad_step(self):
        with pytest.raises(ValueError):
            gen_sde(0, dt=0.0)


class TestNoisySine:
    def test_noise_free(self):
        series = gen_noisy_sine(0, noise_variance=0.0)
        assert series.n == 628
        assert series.scale <= 1.0
        np.testing.assert_array_equal(series.values, np.sin(0.01 * np.arange(628)))

    def test_noise_variance(self):
        t = 0.01 * np.arange(628)
        for seed in range(10):
            noise = gen_noisy_sine(seed).values - np.sin(t)
            assert 0.07 <= np.var(noise, ddof=1) <= 0.13


class TestMultiscale:
    def test_single_fast_layer(self):
        values = gen_multiscale(5, layers=(1,)).values
        assert values.size == 1000
        assert np.all((values >= 0.0) & (values < 1.0))
        blocks = values.reshape(100, 10)
        assert np.all(blocks == blocks[:, :1])
        assert np.all(np.diff(blocks[:, 0]) != 0.0)

    def test_layers_hold_their_draws(self):
        middle = gen_multiscale(5, layers=(2,)).values
        assert np.unique(middle).size == 10
        assert np.all((middle >= 0.0) & (middle < 10.0))
        slow = gen_multiscale(5, layers=(3,)).values
        assert np.unique(slow).size == 1
        assert 0.0 <= slow[0] < 100.0

    def test_layers_share_draws(self):
        # a layer's draws do not depend on which other layers are enabled
        full = gen_multiscale(5).values
        parts = sum(gen_multiscale(5, layers=(k,)).values for k in (1, 2, 3))
        np.testing.assert_allclose(full, parts, rtol=0, atol=1e-12)


def test_chirp_is_deterministic():
    chirp = gen_chirp()
    assert chirp.n == 201
    assert chirp[0] == 0.0
    assert np.array_equal(chirp.values, gen_chirp().values)


class TestGenerate:
    @pytest.mark.parametrize("kind, length", [
        (SignalKind.SDE, 2001),
        (SignalKind.NOISY_SINE, 628),
        (SignalKind.MULTISCALE, 1000),
        (SignalKind.CHIRP, 201),
    ])
    def test_default_lengths(self, kind, length):
        assert generate(GeneratorSpec(kind=kind, seed=7)).n == length

    def test_overrides_reach_the_generator(self):
        spec = GeneratorSpec(kind="sde", seed=7, overrides=GeneratorOverrides(n=10, dt=0.01, y0=0.0))
        series = generate(spec)
        assert series.n == 11
        assert np.array_equal(series.values, gen_sde(7, n=10, dt=0.01, y0=0.0).values)

    def test_unknown_override_is_rejected(self):
        with pytest.raises(ValidationError):
            GeneratorOverrides(amplitude=2.0)

    @pytest.mark.parametrize("kind, overrides", [
        ("chirp", {"n": 10}),
        ("noisy-sine", {"dt": 0.1}),
        ("noisy-sine", {"n": 100}),
        ("multiscale", {"y0": 1.0}),
        ("sde", {"layers": (1,)}),
    ])
    def test_unused_override_is_rejected(self, kind, overrides):
        with pytest.raises(ValidationError, match="does not take"):
            GeneratorSpec(kind=kind, overrides=GeneratorOverrides(**overrides))

    def test_noisy_sine_takes_noise_variance(self):
        spec = GeneratorSpec(kind="noisy-sine", seed=2, overrides=GeneratorOverrides(noise_variance=0.5))
        assert np.array_equal(generate(spec).values, gen_noisy_sine(2, noise_variance=0.5).values)

    def test_seed_range(self):
        with pytest.raises(ValidationError):
            GeneratorSpec(kind="chirp", seed=-1)
