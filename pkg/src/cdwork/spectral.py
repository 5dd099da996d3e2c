"""Dense Hermitian eigendecomposition with a fixed gauge, plus the unitary
step used by the propagation oracle.

Eigenvalues are returned in ascending order and every eigenvector is phased
so that its largest-modulus entry is real and non-negative.  The convention
is arbitrary but deterministic, which is all downstream code needs: the
control construction is built from projectors and is gauge invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances as tol
from .errors import NonHermitianInput, SolverFailure


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of a Hermitian operator.

    ``eigenvalues`` ascend; ``eigenvectors`` holds orthonormal columns, one
    per eigenvalue, in the fixed gauge described in the module docstring.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source_dim: int


def _as_operator(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"operator must be a square matrix, got shape {a.shape}")
    if a.shape[0] < 2:
        raise ValueError("operator dimension must be at least 2")
    if not np.all(np.isfinite(a)):
        raise ValueError("operator contains non-finite entries")
    scale = 1.0 + float(np.max(np.abs(a)))
    deviation = float(np.max(np.abs(a - a.conj().T)))
    if deviation > tol.HERMITICITY * scale:
        raise NonHermitianInput(
            f"max |A - A^dag| = {deviation:.3e} exceeds {tol.HERMITICITY:.0e} * (1 + max|A|)"
        )
    return a


def _fix_gauge(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column's phase so its largest-modulus entry is real >= 0."""
    for j in range(vectors.shape[1]):
        k = int(np.argmax(np.abs(vectors[:, j])))
        pivot = vectors[k, j]
        magnitude = abs(pivot)
        if magnitude > 0.0:
            vectors[:, j] *= pivot.conjugate() / magnitude
    return vectors


def eigendecompose(a) -> SpectralDecomposition:
    """Diagonalize a Hermitian matrix with deterministic ordering and gauge.

    Raises NonHermitianInput when the input fails the Hermiticity check and
    SolverFailure when the eigensolver fails or its output does not
    reconstruct the input.
    """
    a = _as_operator(a)
    try:
        values, vectors = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise SolverFailure(f"eigensolver did not converge: {exc}") from exc

    order = np.argsort(values, kind="stable")
    values = np.ascontiguousarray(values[order])
    vectors = _fix_gauge(np.ascontiguousarray(vectors[:, order]))

    scale = 1.0 + float(np.max(np.abs(a)))
    reconstruction = (vectors * values) @ vectors.conj().T
    residual = float(np.max(np.abs(a - reconstruction)))
    if residual > tol.RECONSTRUCTION * scale:
        raise SolverFailure(
            f"reconstruction residual {residual:.3e} exceeds "
            f"{tol.RECONSTRUCTION:.0e} * (1 + max|A|)"
        )
    return SpectralDecomposition(values, vectors, a.shape[0])


def unitary_step(a, dt: float) -> np.ndarray:
    """Return exp(-i * A * dt) for Hermitian A via its spectral decomposition."""
    if not np.isfinite(dt):
        raise ValueError("dt must be finite")
    dec = eigendecompose(a)
    phases = np.exp(-1j * dec.eigenvalues * dt)
    return (dec.eigenvectors * phases) @ dec.eigenvectors.conj().T


def apply_unitary_step(dec: SpectralDecomposition, dt: float, state: np.ndarray) -> np.ndarray:
    """Apply exp(-i * A * dt) to a state given a decomposition of A.

    Avoids forming the dense propagator; used by the stepping loop.
    """
    amplitudes = dec.eigenvectors.conj().T @ state
    amplitudes *= np.exp(-1j * dec.eigenvalues * dt)
    return dec.eigenvectors @ amplitudes
