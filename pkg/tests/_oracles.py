"""Independent numerical oracles used across the test suite.

The quadrature oracle evaluates the window's quadratic-phase transform by
composite Gauss-Legendre integration, entirely independent of the closed
form it is used to check.
"""

import numpy as np

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(80)


def quad_kernel_transform(eta, lam, support: float = 10.0, panels: int = 40):
    """Quadrature of ``integral g(t) exp(-2j pi eta t - 1j pi lam t^2) dt``.

    Composite 80-point Gauss-Legendre on [-support, support]; accurate to
    well below 1e-10 for |eta|, |lam| <= a few.
    """
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    edges = np.linspace(-support, support, panels + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    t = (centers[:, None] + half * _GL_NODES[None, :]).ravel()
    w = np.tile(half * _GL_WEIGHTS, panels)
    g = np.exp(-0.5 * t * t) / np.sqrt(2.0 * np.pi)
    phase = np.exp(
        -2j * np.pi * eta[:, None] * t[None, :]
        - 1j * np.pi * lam[:, None] * t[None, :] ** 2
    )
    out = (phase * (g * w)[None, :]).sum(axis=1)
    return out if out.size > 1 else complex(out[0])


def quad_abs_moment(n: int, support: float = 12.0, panels: int = 48) -> float:
    """Quadrature of ``integral |g(t) t^n| dt``."""
    edges = np.linspace(-support, support, panels + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    t = (centers[:, None] + half * _GL_NODES[None, :]).ravel()
    w = np.tile(half * _GL_WEIGHTS, panels)
    g = np.exp(-0.5 * t * t) / np.sqrt(2.0 * np.pi)
    return float(np.sum(np.abs(g * t**n) * w))
