import math

import numpy as np
import pytest

from recurrent_tda.frames import SignalFrame
from recurrent_tda.synth import (
    NoiseSpec,
    SignalSpec,
    add_noise,
    generate_signal,
    rmse,
    squeeze,
)


class TestSqueeze:
    def test_center_attenuation(self):
        assert squeeze(0.0, 1.0, depth=0.9, width=0.5) == pytest.approx(0.1)

    def test_edge_value(self):
        expected = 1.0 - 0.9 * math.exp(-0.5)
        assert squeeze(1.0, 1.0, depth=0.9, width=0.5) == pytest.approx(expected)
        assert expected == pytest.approx(0.45412, abs=1e-5)

    def test_zero_depth_is_unity(self):
        xs = np.linspace(-2.0, 2.0, 11)
        np.testing.assert_array_equal(squeeze(xs, 2.0, depth=0.0, width=0.5), np.ones(11))

    def test_requires_positive_reference(self):
        with pytest.raises(ValueError):
            squeeze(1.0, 0.0, depth=0.9, width=0.5)


class TestGenerateSignal:
    def test_initial_sample(self):
        frame = generate_signal(SignalSpec())
        assert frame.values[0, 0] == pytest.approx(10.0)
        assert frame.values[0, 1] == pytest.approx(0.0, abs=1e-12)

    def test_time_grid_includes_endpoints(self):
        frame = generate_signal(SignalSpec())
        assert frame.n_samples == 500
        assert frame.times[0] == 0.0 and frame.times[-1] == pytest.approx(2.0)

    def test_phase_follows_linear_rate_ramp(self):
        spec = SignalSpec()
        frame = generate_signal(spec)
        t = frame.times
        rate = 2.0 * np.pi * (spec.f_start + (spec.f_end - spec.f_start) * t / spec.t_max)
        np.testing.assert_allclose(frame.values[:, 0], 10.0 * np.cos(rate * t), atol=1e-12)
        # initial angular rate is 2*pi*f_start: the first phase increment matches
        assert rate[0] == pytest.approx(2.0 * np.pi)
        first_phase = math.acos(frame.values[1, 0] / 10.0)
        assert first_phase == pytest.approx(rate[1] * t[1], rel=1e-9)

    def test_second_channel_respects_squeeze_envelope(self):
        frame = generate_signal(SignalSpec())
        y = frame.values[:, 1]
        assert np.abs(y).max() <= 2.0
        x = frame.values[:, 0]
        center = np.abs(x) < 0.5
        assert np.abs(y[center]).max() <= 0.25

    def test_deterministic(self):
        a = generate_signal(SignalSpec())
        b = generate_signal(SignalSpec())
        assert np.array_equal(a.values, b.values)
        assert np.array_equal(a.times, b.times)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SignalSpec(f_start=0.0)
        with pytest.raises(ValueError):
            SignalSpec(f_start=5.0, f_end=1.0)
        with pytest.raises(ValueError):
            SignalSpec(squeeze_depth=1.0)
        with pytest.raises(ValueError):
            SignalSpec(n=1)


class TestAddNoise:
    def test_infinite_snr_returns_input_unchanged(self):
        frame = generate_signal(SignalSpec())
        out = add_noise(frame, NoiseSpec(snr_db=math.inf, seed=4))
        assert np.array_equal(out.values, frame.values)

    def test_bit_identical_reproduction(self):
        frame = generate_signal(SignalSpec())
        a = add_noise(frame, NoiseSpec(snr_db=10.0, seed=99))
        b = add_noise(frame, NoiseSpec(snr_db=10.0, seed=99))
        assert np.array_equal(a.values, b.values)

    def test_different_seeds_differ(self):
        frame = generate_signal(SignalSpec())
        a = add_noise(frame, NoiseSpec(snr_db=10.0, seed=1))
        b = add_noise(frame, NoiseSpec(snr_db=10.0, seed=2))
        assert not np.array_equal(a.values, b.values)

    def test_sigma_at_twenty_db(self):
        values = np.column_stack([np.full(200_000, 3.0)])
        frame = SignalFrame(np.linspace(0, 1, 200_000), values)
        noisy = add_noise(frame, NoiseSpec(snr_db=20.0, seed=0))
        sigma = (noisy.values - values).std()
        assert sigma == pytest.approx(0.1 * 3.0, rel=0.02)

    def test_empirical_snr_converges(self):
        rng = np.random.default_rng(8)
        values = rng.normal(size=(100_000, 2)) * np.array([5.0, 0.3])
        frame = SignalFrame(np.linspace(0.0, 1.0, 100_000), values)
        for target in (0.0, 13.0):
            noisy = add_noise(frame, NoiseSpec(snr_db=target, seed=17))
            for c in range(2):
                signal_power = np.mean(values[:, c] ** 2)
                noise_power = np.mean((noisy.values[:, c] - values[:, c]) ** 2)
                measured = 10.0 * np.log10(signal_power / noise_power)
                assert abs(measured - target) < 0.2

    def test_noise_spec_validation(self):
        with pytest.raises(ValueError):
            NoiseSpec(snr_db=math.nan, seed=0)
        with pytest.raises(ValueError):
            NoiseSpec(snr_db=-math.inf, seed=0)
        with pytest.raises(ValueError):
            NoiseSpec(snr_db=20.0, seed=-1)


class TestRmse:
    def make(self, *columns):
        columns = np.column_stack(columns)
        return SignalFrame(np.arange(len(columns), dtype=float), columns)

    def test_zero_for_identical(self):
        frame = self.make([1.0, 2.0, 3.0])
        assert rmse(frame, frame, 0) == 0.0

    def test_constant_offset(self):
        a = self.make([0.0, 0.0])
        b = self.make([1.0, 1.0])
        assert rmse(a, b, 0) == pytest.approx(1.0)

    def test_mixed_values(self):
        a = self.make([0.0, 3.0])
        b = self.make([4.0, 0.0])
        assert rmse(a, b, 0) == pytest.approx(math.sqrt(25.0 / 2.0))
        assert rmse(a, b, 0) == pytest.approx(3.53553, abs=1e-5)

    def test_symmetry(self):
        rng = np.random.default_rng(5)
        a = self.make(rng.normal(size=8))
        b = self.make(rng.normal(size=8))
        assert rmse(a, b, 0) == rmse(b, a, 0)

    def test_shape_mismatch_rejected(self):
        a = self.make([0.0, 1.0])
        b = self.make([0.0, 1.0, 2.0])
        with pytest.raises(ValueError):
            rmse(a, b, 0)

    def test_channel_range_checked(self):
        a = self.make([0.0, 1.0])
        with pytest.raises(ValueError):
            rmse(a, a, 1)
