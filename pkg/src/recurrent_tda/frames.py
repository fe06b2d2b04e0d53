"""Uniformly sampled multichannel signals and their CSV round-trip."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from recurrent_tda.validation import as_float_matrix, as_float_vector

#: Maximum relative deviation tolerated between time steps.
TIME_GRID_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SignalFrame:
    """A uniformly sampled signal: shared time grid plus per-channel values.

    ``times`` has length n with a strictly increasing, constant step;
    ``values`` is the n x d matrix of channel samples.  Instances are
    immutable and safe to share between threads.
    """

    times: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        times = as_float_vector(self.times, "times")
        values = as_float_matrix(self.values, "values")
        if times.shape[0] != values.shape[0]:
            raise ValueError(
                f"times has {times.shape[0]} samples but values has {values.shape[0]}"
            )
        if times.shape[0] < 2:
            raise ValueError("a signal needs at least 2 samples")
        if values.shape[1] < 1:
            raise ValueError("a signal needs at least 1 channel")
        steps = np.diff(times)
        if np.any(steps <= 0):
            raise ValueError("times must be strictly increasing")
        step = steps.mean()
        if np.max(np.abs(steps - step)) > TIME_GRID_TOLERANCE * step:
            raise ValueError("times must be uniformly spaced")
        times.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def n_samples(self) -> int:
        return self.times.shape[0]

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]

    @property
    def time_step(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def sample_rate(self) -> float:
        """Samples per second, derived from the uniform grid."""
        return float((self.n_samples - 1) / (self.times[-1] - self.times[0]))

    def with_values(self, values: np.ndarray) -> "SignalFrame":
        """Same time grid, new channel values."""
        return SignalFrame(self.times.copy(), values)

    def channel(self, index: int) -> np.ndarray:
        return self.values[:, index]


def write_signal_csv(frame: SignalFrame, path_or_buffer) -> None:
    """Write ``t,c0,c1,...`` rows with round-trip-exact decimal formatting."""
    header = "t," + ",".join(f"c{i}" for i in range(frame.n_channels))
    lines = [header]
    for t, row in zip(frame.times, frame.values):
        lines.append(",".join([repr(float(t))] + [repr(float(v)) for v in row]))
    text = "\n".join(lines) + "\n"
    if isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__"):
        with open(path_or_buffer, "w") as fh:
            fh.write(text)
    else:
        path_or_buffer.write(text)


def read_signal_csv(path_or_buffer) -> SignalFrame:
    """Read a signal written by :func:`write_signal_csv`."""
    if isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__"):
        with open(path_or_buffer) as fh:
            text = fh.read()
    else:
        text = path_or_buffer.read()
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        raise ValueError("empty signal CSV")
    header = rows[0].split(",")
    if header[0] != "t":
        raise ValueError(f"expected signal CSV header starting with 't', got {rows[0]!r}")
    data = np.loadtxt(io.StringIO("\n".join(rows[1:])), delimiter=",", ndmin=2)
    return SignalFrame(data[:, 0], data[:, 1:])
