"""Shared generators for randomized sweeps (seeded by each test)."""

import numpy as np

from kreinext import ExtensionParams


def random_hermitian(rng, n, scale=1.0):
    raw = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (raw + raw.conj().T) / 2.0


def random_projector(rng, n, rank=None):
    if rank is None:
        rank = int(rng.integers(0, n + 1))
    if rank == 0:
        return np.zeros((n, n), dtype=complex)
    raw = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    q, _ = np.linalg.qr(raw)
    return q @ q.conj().T


def random_params(rng, n, rank=None, scale=1.0) -> ExtensionParams:
    pi = random_projector(rng, n, rank)
    theta = pi @ random_hermitian(rng, n, scale) @ pi
    theta = (theta + theta.conj().T) / 2.0
    return ExtensionParams(pi, theta)


def one_sided_derivatives(samples, h):
    """Inward boundary derivatives of uniform samples, 4th order."""
    f = np.asarray(samples)
    d0 = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
    da = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * h)
    return d0, -da
