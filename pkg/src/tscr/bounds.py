"""Theoretical error bounds as runtime diagnostics.

All quantities are evaluated for the Gaussian window with a fixed physical
width sigma seconds (the convention of :mod:`tscr.transform`):

* the linear-chirp remainder bound ``Pi = eps1*I1*sigma +
  (pi/3)*eps3*I3*sigma^3`` depends only on the window's physical extent,
  so it is scale-free;
* the out-of-zone kernel ceiling ``Upsilon`` takes the worse of the
  scale-mismatch branch (largest at the top scale a2) and the chirp-rate
  mismatch branch;
* the ridge error bounds invert the separable kernel envelopes
  ``beta(eta) = exp(-2 pi^2 eta^2)`` and
  ``gamma(lam) = (1 + 4 pi^2 lam^2)^(-1/4)``: ``Bd1`` bounds the IF
  estimate error |mu/a_hat - IF| in Hz, ``Bd2`` the chirp-rate error in
  Hz/s, and ``Bd3`` the complex recovery error.

The inversions require ``2*Err/A <= 1 - exp(-1/4)``; configurations that
violate it are flagged per component instead of raising.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .transform import pft_gaussian, window_moment

__all__ = [
    "BoundsInput",
    "BoundsReport",
    "C0_GAUSSIAN",
    "kernel_magnitude",
    "remainder_bound",
    "upsilon_gaussian",
    "err_ell",
    "gaussian_beta_gamma_inverse",
    "error_bounds",
]

#: largest admissible 2*Err/A for the Gaussian envelope pair
C0_GAUSSIAN = 1.0 - math.exp(-0.25)

_I1 = window_moment(1)
_I2 = window_moment(2)
_I3 = window_moment(3)


def kernel_magnitude(eta, lam):
    """|kernel transform| = (1+4 pi^2 lam^2)^(-1/4) exp(-2 pi^2 eta^2/(1+4 pi^2 lam^2))."""
    eta = np.asarray(eta, dtype=float)
    lam = np.asarray(lam, dtype=float)
    den = 1.0 + 4.0 * np.pi**2 * lam**2
    out = den**-0.25 * np.exp(-2.0 * np.pi**2 * eta**2 / den)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class BoundsInput:
    """Everything the bound formulas need at one analysis time b."""

    eps1: float
    eps3: float
    sigma: float
    mu: float
    delta: float
    delta1: float
    a1: float
    a2: float
    amplitudes: tuple
    if_values: tuple
    cr_values: tuple

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))
        object.__setattr__(self, "if_values", tuple(float(v) for v in self.if_values))
        object.__setattr__(self, "cr_values", tuple(float(v) for v in self.cr_values))
        if self.eps1 < 0 or self.eps3 < 0:
            raise ValueError("eps1 and eps3 must be nonnegative")
        for name in ("sigma", "mu", "delta1", "a1", "a2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0,1), got {self.delta}")
        if self.a2 < self.a1:
            raise ValueError("need a1 <= a2")
        if len(self.amplitudes) == 0:
            raise ValueError("amplitudes must be non-empty")
        if len(self.if_values) != len(self.amplitudes) or len(self.cr_values) != len(self.amplitudes):
            raise ValueError("amplitudes, if_values and cr_values must have equal length")
        if any(a <= 0 for a in self.amplitudes):
            raise ValueError("amplitudes must be positive")
        if any(f <= 0 for f in self.if_values):
            raise ValueError("if_values must be positive")

    @property
    def k(self) -> int:
        return len(self.amplitudes)

    @property
    def total_amplitude(self) -> float:
        return float(sum(self.amplitudes))

    @property
    def min_amplitude(self) -> float:
        return float(min(self.amplitudes))


def remainder_bound(inp: BoundsInput, a: float = 1.0) -> float:
    """Bound on |U - linear-chirp surrogate| at any node: M * Pi.

    With the window width fixed in physical time, Pi does not depend on the
    scale a (kept as an argument for interface symmetry).
    """
    if not a > 0:
        raise ValueError("scale must be positive")
    pi_val = inp.eps1 * _I1 * inp.sigma + (math.pi / 3.0) * inp.eps3 * _I3 * inp.sigma**3
    return inp.total_amplitude * pi_val


def _pi_value(inp: BoundsInput) -> float:
    return inp.eps1 * _I1 * inp.sigma + (math.pi / 3.0) * inp.eps3 * _I3 * inp.sigma**3


def upsilon_gaussian(inp: BoundsInput) -> float:
    """Ceiling on the kernel magnitude outside every separation zone.

    ``max( (2 pi^2)^(-1/4) sqrt(a2/(sigma*delta)),
    1/(sigma*sqrt(2 pi delta1)) )``; returns ``inf`` for degenerate
    separation parameters.
    """
    if inp.delta <= 0 or inp.delta1 <= 0:
        return math.inf
    branch_scale = (2.0 * math.pi**2) ** -0.25 * math.sqrt(inp.a2 / (inp.sigma * inp.delta))
    branch_chirp = 1.0 / (inp.sigma * math.sqrt(2.0 * math.pi * inp.delta1))
    return max(branch_scale, branch_chirp)


def err_ell(inp: BoundsInput, ell: int) -> float:
    """Total interference-plus-remainder bound for component ``ell``."""
    if not 0 <= ell < inp.k:
        raise IndexError(f"component index {ell} out of range for K={inp.k}")
    ups = upsilon_gaussian(inp)
    cross = sum(a for i, a in enumerate(inp.amplitudes) if i != ell)
    return inp.total_amplitude * _pi_value(inp) + cross * ups


def gaussian_beta_gamma_inverse(c: float) -> tuple:
    """Invert the Gaussian kernel envelopes at level 1-c.

    Returns ``(beta_inv, gamma_inv)`` with
    ``beta_inv = sqrt(-ln(1-c))/(pi sqrt(2))`` and
    ``gamma_inv = sqrt(1-(1-c)^4)/(2 pi (1-c)^2)``.  Valid for
    ``0 <= c <= 1 - exp(-1/4)``.
    """
    if not 0.0 <= c <= C0_GAUSSIAN + 1e-15:
        raise ValueError(
            f"c={c} outside [0, 1-exp(-1/4)]={C0_GAUSSIAN:.6f}; envelope inversion invalid"
        )
    xi = 1.0 - c
    beta_inv = math.sqrt(max(-math.log(xi), 0.0)) / (math.pi * math.sqrt(2.0))
    gamma_inv = math.sqrt(max(1.0 - xi**4, 0.0)) / (2.0 * math.pi * xi**2)
    return beta_inv, gamma_inv


@dataclass
class BoundsReport:
    pi_value: float
    pi0: float
    pi_ell: list
    upsilon: float
    err: list
    bd1: list
    bd2: list
    bd3: list
    hypothesis_ok: list
    theorem1_condition_ok: bool
    eps_tilde_window: tuple
    inputs: dict = field(default_factory=dict)

    def to_json(self, indent: int = 2) -> str:
        def clean(v):
            if isinstance(v, float) and math.isnan(v):
                return None
            return v

        payload = {
            "pi": self.pi_value,
            "pi0": self.pi0,
            "upsilon": self.upsilon if math.isfinite(self.upsilon) else "inf",
            "separation_condition_ok": self.theorem1_condition_ok,
            "threshold_window": {
                "lo": self.eps_tilde_window[0],
                "hi": self.eps_tilde_window[1],
            },
            "components": [
                {
                    "index": i + 1,
                    "pi_ell": self.pi_ell[i],
                    "err": self.err[i],
                    "hypothesis_ok": self.hypothesis_ok[i],
                    "bd1_if_hz": clean(self.bd1[i]),
                    "bd2_chirp_rate": clean(self.bd2[i]),
                    "bd3_recovery": clean(self.bd3[i]),
                }
                for i in range(len(self.err))
            ],
            "inputs": self.inputs,
        }
        return json.dumps(payload, indent=indent)


def error_bounds(inp: BoundsInput) -> BoundsReport:
    """Evaluate every bound quantity for one configuration.

    Components whose ``2*Err/A`` exceeds the invertible range are flagged
    (``hypothesis_ok[l] = False``) and get NaN bounds rather than an
    exception.
    """
    pi_val = _pi_value(inp)
    ups = upsilon_gaussian(inp)
    m_total = inp.total_amplitude
    nu = inp.min_amplitude
    errs = [err_ell(inp, l) for l in range(inp.k)]
    bd1, bd2, bd3, ok = [], [], [], []
    for l in range(inp.k):
        c = 2.0 * errs[l] / inp.amplitudes[l]
        if not math.isfinite(c) or c > C0_GAUSSIAN:
            ok.append(False)
            bd1.append(math.nan)
            bd2.append(math.nan)
            bd3.append(math.nan)
            continue
        beta_inv, gamma_inv = gaussian_beta_gamma_inverse(c)
        ok.append(True)
        bd1.append(beta_inv / inp.sigma)
        bd2.append(gamma_inv / inp.sigma**2)
        bd3.append(
            errs[l]
            + 2.0 * math.pi * _I1 * inp.amplitudes[l] * beta_inv
            + math.pi * _I2 * inp.amplitudes[l] * gamma_inv
        )
    guard = m_total * (ups + pi_val)
    report = BoundsReport(
        pi_value=pi_val,
        pi0=pi_val,
        pi_ell=[pi_val] * inp.k,
        upsilon=ups,
        err=errs,
        bd1=bd1,
        bd2=bd2,
        bd3=bd3,
        hypothesis_ok=ok,
        theorem1_condition_ok=bool(2.0 * guard <= nu),
        eps_tilde_window=(guard, nu - guard),
        inputs={
            "eps1": inp.eps1,
            "eps3": inp.eps3,
            "sigma": inp.sigma,
            "mu": inp.mu,
            "delta": inp.delta,
            "delta1": inp.delta1,
            "a1": inp.a1,
            "a2": inp.a2,
            "amplitudes": list(inp.amplitudes),
            "if_values": list(inp.if_values),
            "cr_values": list(inp.cr_values),
        },
    )
    return report
