"""Shared random generators for the test suite."""
from __future__ import annotations

import numpy as np


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (g + g.conj().T)


def random_positive_definite(rng: np.random.Generator, n: int, floor: float = 0.5) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return g @ g.conj().T / n + floor * np.eye(n)


def random_density(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    z = g @ g.conj().T
    return z / np.trace(z).real


def random_conditioned_invertible(
    rng: np.random.Generator, n: int, log10_cond: float = 3.0
) -> np.ndarray:
    """Random invertible complex matrix with condition number <= 10**log10_cond."""

    def haar_unitary() -> np.ndarray:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        q, r = np.linalg.qr(g)
        return q * (np.diagonal(r) / np.abs(np.diagonal(r)))

    s = 10.0 ** rng.uniform(-log10_cond / 2, log10_cond / 2, n)
    return (haar_unitary() * s) @ haar_unitary()
