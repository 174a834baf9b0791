"""Quadrature helpers: composite Gauss-Legendre with panel doubling, and the
uniform (trapezoidal) rule for periodic integrands.

The uniform rule on a full period integrates trigonometric polynomials of
degree < m exactly, which is why the periodic convolution paths use it; the
adaptive Gauss-Legendre path serves one-off normalizations.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import NumericalError


@lru_cache(maxsize=None)
def _gl_nodes(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def gauss_legendre_panels(f, a: float, b: float, panels: int, order: int = 16) -> float:
    """Composite Gauss-Legendre integral of a vectorized callable on [a, b]."""
    x, w = _gl_nodes(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return float(weights @ np.asarray(f(nodes), dtype=float))


def adaptive_gauss_legendre(
    f, a: float, b: float, rel_tol: float = 1e-12, start_panels: int = 8, max_doublings: int = 14
) -> tuple[float, int]:
    """Panel-doubling Gauss-Legendre integration with a convergence check.

    Returns (value, panels used). Raises NumericalError if successive
    refinements fail to agree within rel_tol.
    """
    panels = start_panels
    prev = gauss_legendre_panels(f, a, b, panels)
    for _ in range(max_doublings):
        panels *= 2
        cur = gauss_legendre_panels(f, a, b, panels)
        if abs(cur - prev) <= rel_tol * max(1.0, abs(cur)):
            return cur, panels
        prev = cur
    raise NumericalError(
        f"quadrature did not converge on [{a}, {b}] after {panels} panels "
        f"(last delta {abs(cur - prev):.3e})"
    )


def periodic_nodes(m: int) -> tuple[np.ndarray, float]:
    """Uniform nodes on [-pi, pi) and the common weight 2*pi/m."""
    t = -np.pi + 2.0 * np.pi * np.arange(m) / m
    return t, 2.0 * np.pi / m
