"""Shared quadrature helpers: smooth cutoffs, Gauss-Legendre, Neville tables.

The smooth transition used everywhere is built from the classical
exp(-1/t) mollifier, so every cutoff in the package is C-infinity and the
periodic trapezoidal rules applied on top of it stay spectrally convergent.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "smooth_step",
    "bump_indicator",
    "gauss_legendre",
    "neville_at_zero",
    "torus_axis",
]


def _mollifier(x):
    """exp(-1/x) for x > 0, 0 otherwise; vectorised and overflow-safe."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(x):
    """C-infinity monotone step: 0 for x <= 0, 1 for x >= 1."""
    a = _mollifier(np.asarray(x, dtype=float))
    b = _mollifier(1.0 - np.asarray(x, dtype=float))
    return a / (a + b)


def bump_indicator(u):
    """C-infinity even cutoff of |u|: equals 1 for |u| <= 1/2, 0 for |u| >= 1."""
    u = np.abs(np.asarray(u, dtype=float))
    return smooth_step((1.0 - u) / 0.5)


def gauss_legendre(a: float, b: float, order: int):
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(int(order))
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def neville_at_zero(xs, ys) -> tuple[complex, complex]:
    """Polynomial extrapolation of (xs, ys) to x = 0 via a Neville table.

    Returns the top-degree value and the change from the previous degree,
    the latter serving as an error indicator.
    """
    xs = np.asarray(xs, dtype=float)
    tab = [complex(y) for y in ys]
    n = len(tab)
    if n == 0:
        raise ValueError("empty extrapolation table")
    prev = tab[-1]
    for deg in range(1, n):
        for i in range(n - 1, deg - 1, -1):
            tab[i] = (xs[i - deg] * tab[i] - xs[i] * tab[i - 1]) / (xs[i - deg] - xs[i])
        if deg == n - 2:
            prev = tab[-1]
    return tab[-1], tab[-1] - prev


def torus_axis(n: int, start: float = 0.0) -> np.ndarray:
    """n uniform nodes on [start, start + 2 pi); trapezoidal weights are 2 pi / n."""
    return start + 2.0 * np.pi * np.arange(n) / n
