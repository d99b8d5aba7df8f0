"""Bundled synthetic examples and their documented analysis defaults.

``example1`` is a pair of crossing linear chirps on [0, 0.75) at 256 Hz;
``example2`` is a three-component micro-Doppler-style signal on [0, 1) at
256 Hz whose IFs all meet at t = 0.5 while the chirp rates stay apart.
Each builtin carries the grid and window defaults used by the CLI and the
reproduction benchmarks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signal_model import GroundTruth, Signal, gen_linear_chirp, gen_sinusoidal_fm, mix
from .transform import TscrGrid, WindowSpec

__all__ = [
    "BuiltinConfig",
    "make_builtin",
    "example1",
    "example2",
    "example2_sigma_table",
    "BUILTIN_NAMES",
]

BUILTIN_NAMES = ("example1", "example2", "tone", "chirp")

# Hand-tuned width profile for the three-component example: wide enough in
# the middle to split the crossing modes by chirp rate, narrower toward the
# record edges to limit boundary loss.
EXAMPLE2_SIGMA_KNOTS = (
    (0.0, 0.05),
    (0.25, 0.065),
    (0.40, 0.13),
    (0.5, 0.16),
    (0.60, 0.13),
    (0.75, 0.065),
    (1.0, 0.05),
)


def example2_sigma_table():
    b = np.array([k[0] for k in EXAMPLE2_SIGMA_KNOTS])
    s = np.array([k[1] for k in EXAMPLE2_SIGMA_KNOTS])
    return b, s


@dataclass
class BuiltinConfig:
    name: str
    signal: Signal
    truth: GroundTruth
    window: WindowSpec
    grid_kwargs: dict
    k_components: int
    threshold_rel: float = 0.3
    renormalize: bool = False

    def make_grid(self, **overrides) -> TscrGrid:
        kwargs = dict(self.grid_kwargs)
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return TscrGrid.dyadic(
            rate=self.signal.sample_rate,
            b_values=self.signal.times,
            **kwargs,
        )


def example1() -> tuple:
    """Two crossing linear chirps: IF lines 21+67t and 71-61t, 192 samples."""
    s1, t1 = gen_linear_chirp(1.0, 21.0, 67.0, 0.75, 256.0)
    s2, t2 = gen_linear_chirp(1.0, 71.0, -61.0, 0.75, 256.0)
    return mix([s1, s2]), GroundTruth((t1, t2))


def example2() -> tuple:
    """Three modes with a common IF value 41 Hz at t = 0.5, 256 samples."""
    y1, t1 = gen_sinusoidal_fm(41.0, 50.0, 0.5, math.pi / 2.0, 1.0, 256.0)
    y2, t2 = gen_linear_chirp(1.0, 41.0, 0.0, 1.0, 256.0)
    y3, t3 = gen_sinusoidal_fm(41.0, 50.0, 0.5, -math.pi / 2.0, 1.0, 256.0)
    return mix([y1, y2, y3]), GroundTruth((t1, t2, t3))


def make_builtin(
    name: str,
    tone_freq: float = 41.0,
    chirp_start: float = 21.0,
    chirp_rate: float = 67.0,
    amplitude: float = 1.0,
    duration: float = 1.0,
    rate: float = 256.0,
    complex_output: bool = False,
) -> BuiltinConfig:
    """Instantiate a named builtin with its documented analysis defaults."""
    if name == "example1":
        signal, truth = example1()
        window = WindowSpec.constant(0.023)
        grid_kwargs = dict(
            f_min=4.0,
            f_max=120.0,
            n_voices=32,
            lambda_min=-128.0,
            lambda_max=128.0,
            lambda_count=129,
        )
        return BuiltinConfig(name, signal, truth, window, grid_kwargs, k_components=2,
                             threshold_rel=0.3, renormalize=False)
    if name == "example2":
        signal, truth = example2()
        b_knots, s_knots = example2_sigma_table()
        window = WindowSpec.from_table(b_knots, s_knots)
        grid_kwargs = dict(
            f_min=10.0,
            f_max=100.0,
            n_voices=32,
            lambda_min=-260.0,
            lambda_max=260.0,
            lambda_count=131,
        )
        return BuiltinConfig(name, signal, truth, window, grid_kwargs, k_components=3,
                             threshold_rel=0.55, renormalize=True)
    if name == "tone":
        signal, truth = gen_linear_chirp(
            amplitude, tone_freq, 0.0, duration, rate, complex_output=complex_output
        )
        window = WindowSpec.constant(0.06)
        grid_kwargs = dict(
            f_min=max(2.0, tone_freq / 4.0),
            f_max=min(rate / 2.0, tone_freq * 4.0),
            n_voices=32,
            lambda_min=-64.0,
            lambda_max=64.0,
            lambda_count=65,
        )
        return BuiltinConfig(name, signal, GroundTruth((truth,)), window, grid_kwargs, 1)
    if name == "chirp":
        signal, truth = gen_linear_chirp(
            amplitude, chirp_start, chirp_rate, duration, rate, complex_output=complex_output
        )
        f_lo = min(chirp_start, chirp_start + chirp_rate * duration)
        f_hi = max(chirp_start, chirp_start + chirp_rate * duration)
        window = WindowSpec.constant(0.023)
        grid_kwargs = dict(
            f_min=max(2.0, f_lo / 2.0),
            f_max=min(rate / 2.0, f_hi * 2.0),
            n_voices=32,
            lambda_min=-(abs(chirp_rate) * 2.0 + 16.0),
            lambda_max=abs(chirp_rate) * 2.0 + 16.0,
            lambda_count=129,
        )
        return BuiltinConfig(name, signal, GroundTruth((truth,)), window, grid_kwargs, 1)
    raise ValueError(f"unknown builtin {name!r}; choose from {BUILTIN_NAMES}")
