"""Synthetic recurrent test signal, noise injection and the RMSE metric.

The two-channel signal traces a flattened loop whose angular rate rises
linearly over the record; a squeeze factor thins the second channel near
the center of the first, producing the low-amplitude region that makes
isotropic state-space averaging destructive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from recurrent_tda.frames import SignalFrame


@dataclass(frozen=True)
class SignalSpec:
    """Parameters of the synthetic signal generator."""

    f_start: float = 1.0
    f_end: float = 10.0
    t_max: float = 2.0
    n: int = 500
    squeeze_depth: float = 0.9
    squeeze_width: float = 0.5
    amplitudes: tuple = (10.0, 2.0)

    def __post_init__(self):
        if not 0 < self.f_start <= self.f_end:
            raise ValueError(
                f"need f_end >= f_start > 0, got {self.f_start}, {self.f_end}"
            )
        if not self.t_max > 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if not 0 <= self.squeeze_depth < 1:
            raise ValueError(f"squeeze_depth must lie in [0, 1), got {self.squeeze_depth}")
        if not self.squeeze_width >= 0:
            raise ValueError(f"squeeze_width must be non-negative, got {self.squeeze_width}")
        amps = tuple(float(a) for a in self.amplitudes)
        if len(amps) != 2 or any(a <= 0 for a in amps):
            raise ValueError(f"amplitudes must be two positive numbers, got {self.amplitudes}")
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True)
class NoiseSpec:
    """Target signal-to-noise ratio and generator seed."""

    snr_db: float
    seed: int

    def __post_init__(self):
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError(f"snr_db must be finite or +inf, got {self.snr_db}")
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")


def squeeze(x, x_max_abs: float, depth: float, width: float):
    """Attenuation factor ``1 - depth * exp(-width * (x / x_max_abs)**2)``.

    Smallest at ``x = 0``, approaching 1 toward ``|x| = x_max_abs``.
    Accepts scalars or arrays.
    """
    if not x_max_abs > 0:
        raise ValueError(f"x_max_abs must be positive, got {x_max_abs}")
    ratio = np.asarray(x, dtype=np.float64) / x_max_abs
    result = 1.0 - depth * np.exp(-width * ratio * ratio)
    return float(result) if np.isscalar(x) else result


def generate_signal(spec: SignalSpec = SignalSpec()) -> SignalFrame:
    """Deterministic two-channel recurrent signal on [0, t_max].

    Channel 0 is ``A0 * cos(theta(t) * t)`` with the angular rate
    ``theta(t)`` rising linearly from ``2*pi*f_start`` to ``2*pi*f_end``;
    channel 1 is ``A1 * sin(theta(t) * t)`` squeezed by the realized
    channel-0 amplitude.
    """
    t = np.linspace(0.0, spec.t_max, spec.n)
    theta = 2.0 * np.pi * (spec.f_start + (spec.f_end - spec.f_start) * t / spec.t_max)
    phase = theta * t
    x = spec.amplitudes[0] * np.cos(phase)
    y = spec.amplitudes[1] * np.sin(phase) * squeeze(
        x, float(np.abs(x).max()), spec.squeeze_depth, spec.squeeze_width
    )
    return SignalFrame(t, np.column_stack([x, y]))


def add_noise(frame: SignalFrame, spec: NoiseSpec) -> SignalFrame:
    """Add white Gaussian noise per channel at the target SNR.

    Per channel ``c`` the noise deviation is
    ``sqrt(mean(values_c**2) * 10**(-snr_db / 10))``, drawn from a PCG64
    generator seeded by ``(seed, c)``, so equal specs reproduce
    bit-identically.  An infinite SNR returns the frame unchanged.
    """
    if math.isinf(spec.snr_db):
        return frame
    values = frame.values.copy()
    for c in range(frame.n_channels):
        power = float(np.mean(values[:, c] ** 2))
        sigma = math.sqrt(power * 10.0 ** (-spec.snr_db / 10.0))
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([spec.seed, c])))
        values[:, c] += rng.normal(0.0, sigma, frame.n_samples)
    return frame.with_values(values)


def rmse(a: SignalFrame, b: SignalFrame, channel: int) -> float:
    """Root-mean-square difference of one channel across two frames."""
    if a.values.shape != b.values.shape:
        raise ValueError(
            f"frames differ in shape: {a.values.shape} vs {b.values.shape}"
        )
    if not 0 <= channel < a.n_channels:
        raise ValueError(f"channel {channel} out of range for {a.n_channels} channels")
    diff = a.values[:, channel] - b.values[:, channel]
    return float(np.sqrt(np.mean(diff * diff)))
