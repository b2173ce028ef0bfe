"""Small dense numeric kernels shared by the whole package.

Everything here is a thin, contract-checked wrapper around LAPACK (via
numpy) plus a few log-space helpers that keep Poisson/coherent weights
finite for mean photon numbers up to the hundreds.
"""
from __future__ import annotations

import math

import numpy as np

DEFAULT_SEED = 0x5EED_CAFE_D00D

__all__ = [
    "NumericalFailure",
    "as_complex_matrix",
    "hermiticity_defect",
    "hermitian_eigensystem",
    "general_eigenvalues_4",
    "stable_poisson_logweight",
    "poisson_logweights",
    "random_density_matrix",
    "DEFAULT_SEED",
]


class NumericalFailure(RuntimeError):
    """A numeric kernel could not meet its accuracy contract."""


def as_complex_matrix(m, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Return ``m`` as a finite complex matrix, rejecting NaN/Inf entries."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {arr.shape}")
    if shape is not None and arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains non-finite entries")
    return arr


def hermiticity_defect(m: np.ndarray) -> float:
    """Max-norm distance from ``m`` to its conjugate transpose."""
    return float(np.abs(m - m.conj().T).max())


def hermitian_eigensystem(m, tol: float = 1e-9):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    The input must satisfy ``max|M - M^dag| <= tol``; the symmetrized matrix
    is handed to LAPACK so the reconstruction ``V diag(w) V^dag`` matches the
    input to the same order.
    """
    arr = as_complex_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError("matrix is not square")
    defect = hermiticity_defect(arr)
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian: defect {defect:.3e} > {tol:.3e}")
    try:
        w, v = np.linalg.eigh(0.5 * (arr + arr.conj().T))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    return w, v


def general_eigenvalues_4(m) -> np.ndarray:
    """All four eigenvalues of a general (non-Hermitian) 4x4 complex matrix."""
    arr = as_complex_matrix(m, shape=(4, 4))
    try:
        return np.linalg.eigvals(arr)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue computation failed: {exc}") from exc


def stable_poisson_logweight(n: int, gamma: float) -> float:
    """log of the Poisson weight e^{-gamma^2} gamma^{2n} / n!.

    Assembled as ``2n ln(gamma) - gamma^2 - lgamma(n+1)`` so the weight stays
    representable for gamma^2 in the hundreds, where gamma^{2n} alone would
    overflow any fixed-width float.
    """
    if gamma <= 0.0:
        raise ValueError("gamma must be positive (gamma = 0 is a single-sector special case)")
    if n < 0:
        raise ValueError("n must be >= 0")
    return 2.0 * n * math.log(gamma) - gamma * gamma - math.lgamma(n + 1)


def poisson_logweights(n_max: int, gamma: float) -> np.ndarray:
    """Vector of stable_poisson_logweight(n, gamma) for n = 0..n_max."""
    n = np.arange(n_max + 1)
    return 2.0 * n * math.log(gamma) - gamma * gamma - np.array([math.lgamma(k + 1) for k in n])


def random_density_matrix(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    """Random density matrix from the Ginibre ensemble (Hermitian, PSD, unit trace)."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
