"""Hermitian matrices and the Hilbert / Riemannian metrics on the positive definite cone."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "HermitianMatrix",
    "SpectralInterval",
    "as_hermitian_array",
    "eigenvalues",
    "spectral_interval",
    "is_positive_definite",
    "hilbert_distance_psd",
    "hilbert_distance_to_identity",
    "riemannian_distance",
]

# relative eigenvalue floor below which a matrix is rejected as not PD
PD_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Complex square matrix symmetrized to (X + X*)/2 at construction.

    Symmetrization keeps the Hermitian invariant exact after thousands of
    repeated map applications; callers that must reject non-Hermitian user
    input validate the deviation before constructing.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError("HermitianMatrix requires a square 2-d array")
        if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
            raise ValueError("HermitianMatrix entries must be finite")
        m = 0.5 * (m + m.conj().T)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0])


def as_hermitian_array(X) -> np.ndarray:
    """Coerce input to a validated Hermitian ndarray."""
    if isinstance(X, HermitianMatrix):
        return X.matrix
    return HermitianMatrix(np.asarray(X, dtype=complex)).matrix


@dataclass(frozen=True)
class SpectralInterval:
    lambda_min: float
    lambda_max: float

    def __post_init__(self) -> None:
        if self.lambda_min > self.lambda_max:
            raise ValueError(
                f"invalid spectral interval [{self.lambda_min}, {self.lambda_max}]"
            )

    @property
    def width(self) -> float:
        return self.lambda_max - self.lambda_min


def eigenvalues(X) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending."""
    m = as_hermitian_array(X)
    return np.linalg.eigvalsh(m)


def spectral_interval(X) -> SpectralInterval:
    ev = eigenvalues(X)
    return SpectralInterval(float(ev[0]), float(ev[-1]))


def is_positive_definite(evals: np.ndarray) -> bool:
    """PD test on a precomputed ascending spectrum, relative floor PD_FLOOR."""
    lam_min = float(evals[0])
    lam_max = float(evals[-1])
    return lam_min > PD_FLOOR * max(1.0, lam_max)


def _require_pd(X, name: str) -> np.ndarray:
    ev = eigenvalues(X)
    if not is_positive_definite(ev):
        raise ValueError(
            f"{name} is not positive definite: lambda_min={ev[0]:.6e} "
            f"(lambda_max={ev[-1]:.6e})"
        )
    return ev


def _whitened_spectrum(X, Y) -> np.ndarray:
    """Eigenvalues of Y^{-1/2} X Y^{-1/2}, both arguments required PD."""
    _require_pd(X, "X")
    Xm = as_hermitian_array(X)
    Ym = as_hermitian_array(Y)
    if Xm.shape != Ym.shape:
        raise ValueError(f"dimension mismatch: {Xm.shape} vs {Ym.shape}")
    w, U = np.linalg.eigh(Ym)
    if not is_positive_definite(w):
        raise ValueError(
            f"Y is not positive definite: lambda_min={w[0]:.6e} "
            f"(lambda_max={w[-1]:.6e})"
        )
    # eigendecomposition route only; no pseudo-inverse fallback near the boundary
    inv_sqrt = (U * (1.0 / np.sqrt(w))) @ U.conj().T
    M = inv_sqrt @ Xm @ inv_sqrt
    mu = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
    if mu[0] <= 0.0:
        raise ValueError(
            f"whitened matrix lost positivity numerically (lambda_min={mu[0]:.6e})"
        )
    return mu


def hilbert_distance_psd(X, Y) -> float:
    """Hilbert projective distance on the positive definite cone.

    log of the ratio between the extreme eigenvalues of Y^{-1/2} X Y^{-1/2}.
    Symmetric, scaling-invariant in either argument, and invariant under
    congruence X -> F X F* for invertible F.
    """
    mu = _whitened_spectrum(X, Y)
    return float(math.log(mu[-1]) - math.log(mu[0]))


def hilbert_distance_to_identity(X) -> float:
    """log lambda_max(X) - log lambda_min(X) for positive definite X."""
    ev = _require_pd(X, "X")
    return float(math.log(ev[-1]) - math.log(ev[0]))


def riemannian_distance(X, Y) -> float:
    """Affine-invariant Riemannian distance between positive definite matrices.

    Frobenius norm of log(Y^{-1/2} X Y^{-1/2}), computed as the root of the
    sum of squared log-eigenvalues of the whitened matrix.
    """
    mu = _whitened_spectrum(X, Y)
    return float(math.sqrt(float(np.sum(np.log(mu) ** 2))))
