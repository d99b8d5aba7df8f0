"""NumPy implementation of the hot transform kernels.

Used when the compiled extension is unavailable or explicitly disabled via
``TSCR_PURE_PYTHON=1``.  Semantics match ``_kernels.pyx`` exactly; the
compiled module exists purely for speed and strict serial determinism.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def tscr_plane(xw, d, inv_a, lambdas, mu):
    """Evaluate one time slice of the transform on the (scale, chirp-rate) grid.

    Parameters
    ----------
    xw : complex array (n_d,)
        Window-weighted signal samples within the truncated support.
    d : float array (n_d,)
        Sample-time offsets from the analysis time b.
    inv_a : float array (n_a,)
        Reciprocals of the scale grid.
    lambdas : float array (n_lambda,)
        Chirp-rate grid.
    mu : float
        Kernel frequency parameter (kernel oscillates at mu/a Hz).

    Returns
    -------
    complex array (n_a, n_lambda)
        ``sum_n xw[n] * exp(-2j pi mu d[n]/a) * exp(-1j pi lambda d[n]^2)``.
    """
    xw = np.ascontiguousarray(xw, dtype=np.complex128)
    d = np.ascontiguousarray(d, dtype=np.float64)
    inv_a = np.ascontiguousarray(inv_a, dtype=np.float64)
    lambdas = np.ascontiguousarray(lambdas, dtype=np.float64)
    if xw.size == 0:
        return np.zeros((inv_a.size, lambdas.size), dtype=np.complex128)
    osc = np.exp(np.outer(inv_a, d) * (-2j * np.pi * mu))
    quad = np.exp(np.outer(lambdas, d * d) * (-1j * np.pi))
    return (osc * xw) @ quad.T


def tscr_point(xw, d, inv_a, lam, mu):
    """Single-node version of :func:`tscr_plane` for off-grid evaluation."""
    xw = np.asarray(xw, dtype=np.complex128)
    d = np.asarray(d, dtype=np.float64)
    if xw.size == 0:
        return 0.0 + 0.0j
    phase = (-2.0 * np.pi * mu * inv_a) * d - np.pi * lam * d * d
    return complex(np.sum(xw * np.exp(1j * phase)))
