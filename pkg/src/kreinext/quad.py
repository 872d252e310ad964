"""Composite Simpson quadrature on uniform grids, safe for complex samples."""

import numpy as np

__all__ = ["simpson_weights", "simpson", "cumulative_simpson"]


def simpson_weights(n: int, dx: float) -> np.ndarray:
    """Composite Simpson weights for ``n`` uniformly spaced nodes (``n`` odd, >= 3)."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"composite Simpson needs an odd node count >= 3, got {n}")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (dx / 3.0)


def simpson(values, dx: float):
    """Integrate uniformly sampled values over the whole grid.

    Even node counts are handled by a cubic end-interval patch, so both
    parities stay fourth order for smooth integrands.
    """
    f = np.asarray(values)
    n = f.shape[0]
    if n < 3:
        raise ValueError("need at least 3 samples")
    if n % 2 == 1:
        return np.sum(simpson_weights(n, dx) * f)
    head = np.sum(simpson_weights(n - 1, dx) * f[:-1])
    tail = dx / 24.0 * (9.0 * f[-1] + 19.0 * f[-2] - 5.0 * f[-3] + f[-4])
    return head + tail


def cumulative_simpson(values, dx: float) -> np.ndarray:
    """Running integral from the first node, local quadratic rule.

    Each interval contribution integrates the parabola through the three
    nearest samples; unlike the scipy counterpart this keeps complex input
    complex.
    """
    f = np.asarray(values)
    if f.shape[0] < 3:
        raise ValueError("need at least 3 samples")
    out = np.empty(f.shape, dtype=np.result_type(f.dtype, 1.0))
    out[0] = 0.0
    out[1] = dx / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2])
    out[2:] = dx / 12.0 * (-f[:-2] + 8.0 * f[1:-1] + 5.0 * f[2:])
    return np.cumsum(out)
