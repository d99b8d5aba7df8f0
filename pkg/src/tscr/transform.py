"""The time-scale-chirp-rate transform and its Gaussian window machinery.

The transform evaluated here is

    U(a, b, lam) = integral of x(t) * (1/sigma(b)) * g((t-b)/sigma(b))
                   * exp(-2j pi mu (t-b)/a) * exp(-1j pi lam (t-b)^2) dt

with g the unit-integral Gaussian.  The window has a fixed physical width
sigma(b) seconds while the oscillating kernel frequency is mu/a Hz, so a
scale grid maps directly onto an instantaneous-frequency grid.  For a
constant-amplitude linear chirp with IF f0 and chirp rate r the transform
equals ``x(b) * pft_gaussian(sigma*(mu/a - f0), sigma^2*(lam - r))``, which
is the identity every oracle test in this package leans on.

Discretization is a plain Riemann sum over the signal's own samples (no
resampling), with the window truncated at ``truncation_radius * sigma(b)``.
Samples outside the recorded support contribute zero; near the edges the
raw truncated sums are kept by default, with opt-in renormalization by the
in-support window mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .kernels import tscr_plane, tscr_point
from .signal_model import Signal

__all__ = [
    "WindowSpec",
    "TscrGrid",
    "TscrVolume",
    "gaussian_window",
    "pft_gaussian",
    "window_moment",
    "compute_tscr",
    "cwlt_slice",
    "PointEvaluator",
    "write_volume_binary",
    "read_volume_binary",
    "slice_rows",
    "write_slice_csv",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_FLOAT_FMT = "%.17g"


def gaussian_window(t):
    """Unit-integral Gaussian ``exp(-t^2/2)/sqrt(2 pi)``."""
    t = np.asarray(t, dtype=float)
    out = np.exp(-0.5 * t * t) / _SQRT_2PI
    return out if out.ndim else float(out)


def pft_gaussian(eta, lam):
    """Closed-form quadratic-phase Fourier transform of the Gaussian window.

    ``(1 + 2j pi lam)^(-1/2) * exp(-2 pi^2 eta^2 / (1 + 2j pi lam))`` with
    the square root taken in the same quadrant as ``1 + 2j pi lam`` (the
    principal branch does exactly that since the real part is 1).
    """
    eta = np.asarray(eta, dtype=float)
    lam = np.asarray(lam, dtype=float)
    z = 1.0 + 2j * np.pi * lam
    out = np.exp(-2.0 * np.pi**2 * eta**2 / z) / np.sqrt(z)
    return out if out.ndim else complex(out)


def window_moment(n: int) -> float:
    """Absolute moment ``integral |g(t) t^n| dt`` of the Gaussian window.

    Closed form ``2^(n/2) Gamma((n+1)/2) / sqrt(pi)``:
    n=1 -> sqrt(2/pi), n=2 -> 1, n=3 -> 2*sqrt(2/pi).
    """
    if int(n) != n or n < 1:
        raise ValueError(f"moment order must be a positive integer, got {n}")
    n = int(n)
    return 2.0 ** (n / 2.0) * math.gamma((n + 1) / 2.0) / math.sqrt(math.pi)


@dataclass(frozen=True)
class WindowSpec:
    """Gaussian analysis window: width profile sigma(b), kernel frequency mu/a."""

    sigma_fn: Callable[[float], float]
    mu: float = 1.0
    truncation_radius: float = 5.0

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.truncation_radius >= 3.0:
            raise ValueError(
                f"truncation_radius must be at least 3 window widths, got {self.truncation_radius}"
            )

    @classmethod
    def constant(cls, sigma: float, mu: float = 1.0, truncation_radius: float = 5.0):
        if not sigma > 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        return cls(sigma_fn=lambda b: float(sigma), mu=mu, truncation_radius=truncation_radius)

    @classmethod
    def from_table(cls, b_points, sigma_points, mu: float = 1.0, truncation_radius: float = 5.0):
        """Piecewise-linear sigma(b) through the given knots (clamped outside)."""
        b_pts = np.asarray(b_points, dtype=float)
        s_pts = np.asarray(sigma_points, dtype=float)
        if b_pts.size != s_pts.size or b_pts.size < 1:
            raise ValueError("sigma table needs matching, non-empty knot arrays")
        if np.any(s_pts <= 0):
            raise ValueError("sigma table values must be positive")
        if np.any(np.diff(b_pts) <= 0):
            raise ValueError("sigma table knots must be strictly increasing")
        return cls(
            sigma_fn=lambda b: float(np.interp(b, b_pts, s_pts)),
            mu=mu,
            truncation_radius=truncation_radius,
        )

    def sigma(self, b: float) -> float:
        s = float(self.sigma_fn(b))
        if not s > 0:
            raise ValueError(f"sigma_fn({b}) = {s} must be positive")
        return s


@dataclass(frozen=True)
class TscrGrid:
    """Evaluation lattice: analysis times b, scales a (log-spaced), chirp rates."""

    b_values: np.ndarray
    a_values: np.ndarray
    lambda_values: np.ndarray

    def __post_init__(self):
        b = np.ascontiguousarray(self.b_values, dtype=float)
        a = np.ascontiguousarray(self.a_values, dtype=float)
        lam = np.ascontiguousarray(self.lambda_values, dtype=float)
        for name, arr in (("b_values", b), ("a_values", a), ("lambda_values", lam)):
            if arr.size == 0:
                raise ValueError(f"{name} must be non-empty")
            if arr.size > 1 and not np.all(np.diff(arr) > 0):
                raise ValueError(f"{name} must be strictly increasing")
        if not np.all(a > 0):
            raise ValueError("a_values must be positive")
        object.__setattr__(self, "b_values", b)
        object.__setattr__(self, "a_values", a)
        object.__setattr__(self, "lambda_values", lam)

    @property
    def shape(self) -> tuple:
        return (self.b_values.size, self.a_values.size, self.lambda_values.size)

    def if_values(self, mu: float = 1.0) -> np.ndarray:
        """IF readout mu/a for every scale (decreasing along the a axis)."""
        return mu / self.a_values

    @classmethod
    def dyadic(
        cls,
        rate: float,
        b_values,
        f_min: float = 2.0,
        f_max: float | None = None,
        n_voices: int = 32,
        mu: float = 1.0,
        lambda_min: float = -128.0,
        lambda_max: float = 128.0,
        lambda_count: int = 129,
    ) -> "TscrGrid":
        """Dyadic-voice scale grid ``a_j = 2^(j/n_voices) / rate``.

        j spans whatever range keeps the IF readout mu/a inside
        [f_min, f_max] (f_max defaults to Nyquist).
        """
        if f_max is None:
            f_max = rate / 2.0
        if not (0 < f_min < f_max):
            raise ValueError(f"need 0 < f_min < f_max, got [{f_min}, {f_max}]")
        if not f_max <= rate / 2.0 + 1e-12:
            raise ValueError(f"f_max {f_max} exceeds Nyquist {rate / 2.0}")
        if lambda_count < 1:
            raise ValueError("lambda_count must be at least 1")
        # a in [mu/f_max, mu/f_min], snapped to the dyadic lattice
        j_lo = int(math.ceil(n_voices * math.log2(mu * rate / f_max) - 1e-9))
        j_hi = int(math.floor(n_voices * math.log2(mu * rate / f_min) + 1e-9))
        if j_hi < j_lo:
            raise ValueError("scale range is empty; widen [f_min, f_max] or raise n_voices")
        j = np.arange(j_lo, j_hi + 1)
        a = 2.0 ** (j / float(n_voices)) / rate
        lam = np.linspace(lambda_min, lambda_max, lambda_count)
        return cls(np.asarray(b_values, dtype=float), a, lam)


@dataclass(frozen=True)
class TscrVolume:
    """Transform values over a grid, indexed [b][a][lambda]."""

    grid: TscrGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(vals.real)) or not np.all(np.isfinite(vals.imag)):
            raise ValueError("volume contains non-finite values")
        object.__setattr__(self, "values", vals)

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)


def _window_slice(signal: Signal, b: float, radius: float):
    """Index range of samples with |t - b| <= radius, clipped to the record."""
    n = len(signal)
    lo = int(math.ceil((b - radius - signal.start_time) * signal.sample_rate - 1e-9))
    hi = int(math.floor((b + radius - signal.start_time) * signal.sample_rate + 1e-9))
    return max(lo, 0), min(hi, n - 1)


def compute_tscr(
    signal: Signal,
    grid: TscrGrid,
    window: WindowSpec,
    renormalize: bool = False,
    workers: int = 1,
) -> TscrVolume:
    """Evaluate the transform on the full (b, a, lambda) grid.

    Each b slice is an independent windowed sum over the signal's own
    samples, accumulated in index order, so results do not depend on
    ``workers``.
    """
    b_vals = grid.b_values
    if b_vals[0] < signal.start_time - 1e-12 or b_vals[-1] > signal.end_time + 1e-12:
        raise ValueError(
            f"grid b range [{b_vals[0]}, {b_vals[-1]}] outside signal support "
            f"[{signal.start_time}, {signal.end_time}]"
        )
    inv_a = 1.0 / grid.a_values
    lams = grid.lambda_values
    times = signal.times
    x = signal.samples
    dt = signal.dt
    out = np.empty(grid.shape, dtype=np.complex128)

    def one_slice(i: int):
        b = b_vals[i]
        sigma = window.sigma(b)
        lo, hi = _window_slice(signal, b, window.truncation_radius * sigma)
        if hi < lo:
            out[i] = 0.0
            return
        d = times[lo : hi + 1] - b
        w = np.exp(-0.5 * (d / sigma) ** 2) / (_SQRT_2PI * sigma) * dt
        if renormalize:
            mass = float(np.sum(w))
            if mass > 0:
                w = w / mass
        out[i] = tscr_plane(x[lo : hi + 1] * w, d, inv_a, lams, window.mu)

    if workers <= 1:
        for i in range(b_vals.size):
            one_slice(i)
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one_slice, range(b_vals.size)))
    return TscrVolume(grid, out)


class PointEvaluator:
    """Re-evaluate the transform at arbitrary (a, b, lambda) points.

    Used for off-grid ridge refinement and for component recovery at
    refined ridge locations; reproduces ``compute_tscr`` exactly when asked
    for a grid node.
    """

    def __init__(self, signal: Signal, window: WindowSpec, renormalize: bool = False):
        self.signal = signal
        self.window = window
        self.renormalize = renormalize

    def __call__(self, b: float, a: float, lam: float) -> complex:
        sig = self.signal
        sigma = self.window.sigma(b)
        lo, hi = _window_slice(sig, b, self.window.truncation_radius * sigma)
        if hi < lo:
            return 0.0 + 0.0j
        d = sig.times[lo : hi + 1] - b
        w = np.exp(-0.5 * (d / sigma) ** 2) / (_SQRT_2PI * sigma) * sig.dt
        if self.renormalize:
            mass = float(np.sum(w))
            if mass > 0:
                w = w / mass
        return tscr_point(sig.samples[lo : hi + 1] * w, d, 1.0 / a, lam, self.window.mu)


def cwlt_slice(volume: TscrVolume) -> np.ndarray:
    """The lambda-slice nearest zero: the plain wavelet-like transform."""
    lams = volume.grid.lambda_values
    if lams[0] > 0.0 or lams[-1] < 0.0:
        raise ValueError(
            f"lambda grid [{lams[0]}, {lams[-1]}] does not bracket 0; no wavelet slice"
        )
    idx = int(np.argmin(np.abs(lams)))
    return volume.values[:, :, idx]


# -- serialization -----------------------------------------------------------

def slice_rows(volume: TscrVolume, axis: str, value: float):
    """Rows ``(b, a, lambda, value)`` of the slice nearest ``value`` on ``axis``."""
    grid = volume.grid
    axes = {"b": grid.b_values, "a": grid.a_values, "lambda": grid.lambda_values}
    if axis not in axes:
        raise ValueError(f"axis must be one of b/a/lambda, got {axis!r}")
    coords = axes[axis]
    idx = int(np.argmin(np.abs(coords - value)))
    rows = []
    if axis == "b":
        sub = volume.values[idx]
        for j, a in enumerate(grid.a_values):
            for l, lam in enumerate(grid.lambda_values):
                rows.append((grid.b_values[idx], a, lam, sub[j, l]))
    elif axis == "a":
        sub = volume.values[:, idx, :]
        for i, b in enumerate(grid.b_values):
            for l, lam in enumerate(grid.lambda_values):
                rows.append((b, grid.a_values[idx], lam, sub[i, l]))
    else:
        sub = volume.values[:, :, idx]
        for i, b in enumerate(grid.b_values):
            for j, a in enumerate(grid.a_values):
                rows.append((b, a, grid.lambda_values[idx], sub[i, j]))
    return rows


def write_slice_csv(path, volume: TscrVolume, axis: str, value: float):
    rows = slice_rows(volume, axis, value)
    with open(path, "w", encoding="utf-8") as f:
        f.write("b,a,lambda,re,im,abs\n")
        for b, a, lam, u in rows:
            f.write(
                ",".join(
                    _FLOAT_FMT % v for v in (b, a, lam, u.real, u.imag, abs(u))
                )
                + "\n"
            )


def write_volume_binary(path, volume: TscrVolume):
    """Little-endian float64 dump: lengths, grid axes, then re/im pairs."""
    grid = volume.grid
    n_b, n_a, n_l = grid.shape
    header = np.array([n_b, n_a, n_l], dtype="<f8")
    flat = volume.values.reshape(-1)
    data = np.empty(2 * flat.size, dtype="<f8")
    data[0::2] = flat.real
    data[1::2] = flat.imag
    with open(path, "wb") as f:
        f.write(header.tobytes())
        f.write(grid.b_values.astype("<f8").tobytes())
        f.write(grid.a_values.astype("<f8").tobytes())
        f.write(grid.lambda_values.astype("<f8").tobytes())
        f.write(data.tobytes())


def read_volume_binary(path) -> TscrVolume:
    raw = np.fromfile(path, dtype="<f8")
    if raw.size < 3:
        raise ValueError("volume file too short")
    n_b, n_a, n_l = (int(round(v)) for v in raw[:3])
    pos = 3
    b = raw[pos : pos + n_b]
    pos += n_b
    a = raw[pos : pos + n_a]
    pos += n_a
    lam = raw[pos : pos + n_l]
    pos += n_l
    expected = 2 * n_b * n_a * n_l
    data = raw[pos : pos + expected]
    if data.size != expected:
        raise ValueError("volume file data block has wrong length")
    values = (data[0::2] + 1j * data[1::2]).reshape(n_b, n_a, n_l)
    return TscrVolume(TscrGrid(b, a, lam), values)
