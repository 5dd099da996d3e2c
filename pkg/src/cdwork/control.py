"""Counterdiabatic control terms.

The full control term cancels every non-adiabatic transition of the driven
Hamiltonian.  In the instantaneous eigenbasis {eps_n, |phi_n>} of H0 it has
the gap-weighted matrix-element form

    H1 = i sum_{m != n} |phi_m> <phi_m|dH0/dt|phi_n> <phi_n| / (eps_n - eps_m)

which is equivalent to the eigenvector-derivative form but avoids numerical
gauge drift (the derivative form survives only as a test oracle).  The
restricted term keeps only the pairs involving one chosen eigenstate n,
which is i [dP_n/dt, P_n] for the projector P_n = |phi_n><phi_n|.

Degenerate pairs divide by a vanishing gap.  The policy is
skip-if-uncoupled, error-if-coupled: pairs with a gap below ``gap_tol``
contribute nothing when the coupling matrix element is below
``coupling_tol`` and raise DegenerateCoupling otherwise, because silently
zeroing a coupled pair would produce a wrong control field.

The control is switched off identically at t = 0 and t = tau_q regardless
of the instantaneous ramp velocity, so the generator coincides with the
bare Hamiltonian at both ends of the drive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances as tol
from .errors import DegenerateCoupling
from .models import (
    ModelSpec,
    RampProfile,
    build_h0,
    dh0_dg,
    dimension,
    ramp_rate,
    ramp_value,
)
from .spectral import SpectralDecomposition, eigendecompose


@dataclass(frozen=True)
class NoControl:
    """Bare drive, no control term."""


@dataclass(frozen=True)
class FullCD:
    """Full counterdiabatic term suppressing all transitions."""


@dataclass(frozen=True)
class RestrictedCD:
    """Control term suppressing transitions out of eigenstate ``n`` only."""

    n: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("eigenstate index must be non-negative")


ControlScheme = NoControl | FullCD | RestrictedCD


@dataclass(frozen=True)
class DegeneracyPolicy:
    """Tolerances deciding when a small-gap pair is fatal."""

    gap_tol: float = tol.GAP_TOL_DEFAULT
    coupling_tol: float = tol.COUPLING_TOL_DEFAULT

    def __post_init__(self):
        if not (self.gap_tol > 0.0 and self.coupling_tol > 0.0):
            raise ValueError("degeneracy tolerances must be positive")


def _coupling_kernel(
    dec: SpectralDecomposition, h0_dot: np.ndarray, policy: DegeneracyPolicy
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenbasis matrix of dH0/dt, the gap table, and the small-gap mask."""
    h0_dot = np.asarray(h0_dot, dtype=complex)
    vectors = dec.eigenvectors
    coupling = vectors.conj().T @ h0_dot @ vectors
    gaps = dec.eigenvalues[None, :] - dec.eigenvalues[:, None]  # gaps[m, k] = eps_k - eps_m
    small = np.abs(gaps) < policy.gap_tol
    return coupling, gaps, small


def _raise_if_coupled(coupling: np.ndarray, gaps: np.ndarray, blocked: np.ndarray,
                      policy: DegeneracyPolicy) -> None:
    offenders = blocked & (np.abs(coupling) > policy.coupling_tol)
    if np.any(offenders):
        m, k = np.argwhere(offenders)[0]
        raise DegenerateCoupling(
            f"levels ({m}, {k}) are degenerate within gap_tol={policy.gap_tol:.1e} "
            f"(gap {abs(gaps[m, k]):.3e}) but coupled with "
            f"|<m|dH0/dt|n>| = {abs(coupling[m, k]):.3e}"
        )


def _hermitize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


def cd_full(dec: SpectralDecomposition, h0_dot, policy: DegeneracyPolicy = DegeneracyPolicy()
            ) -> np.ndarray:
    """Full counterdiabatic term from the instantaneous eigensystem of H0."""
    coupling, gaps, small = _coupling_kernel(dec, h0_dot, policy)
    off_diagonal = ~np.eye(dec.source_dim, dtype=bool)
    _raise_if_coupled(coupling, gaps, small & off_diagonal, policy)
    kernel = np.zeros_like(coupling)
    active = off_diagonal & ~small
    kernel[active] = 1j * coupling[active] / gaps[active]
    return _hermitize(dec.eigenvectors @ kernel @ dec.eigenvectors.conj().T)


def cd_restricted(dec: SpectralDecomposition, h0_dot, n: int,
                  policy: DegeneracyPolicy = DegeneracyPolicy()) -> np.ndarray:
    """Single-eigenstate control term i [dP_n/dt, P_n]."""
    if not (0 <= n < dec.source_dim):
        raise ValueError(f"eigenstate index {n} outside [0, {dec.source_dim})")
    coupling, gaps, small = _coupling_kernel(dec, h0_dot, policy)
    involves_n = np.zeros_like(small)
    involves_n[n, :] = True
    involves_n[:, n] = True
    involves_n[n, n] = False
    _raise_if_coupled(coupling, gaps, small & involves_n, policy)
    kernel = np.zeros_like(coupling)
    active = involves_n[:, n] & ~small[:, n]
    kernel[active, n] = 1j * coupling[active, n] / gaps[active, n]
    kernel[n, :] = kernel[:, n].conj()
    return _hermitize(dec.eigenvectors @ kernel @ dec.eigenvectors.conj().T)


def control_term(model: ModelSpec, ramp: RampProfile, scheme: ControlScheme, t: float,
                 policy: DegeneracyPolicy = DegeneracyPolicy(),
                 h0_dec: SpectralDecomposition | None = None) -> np.ndarray:
    """Control term H1(t) under the endpoint rule.

    ``h0_dec`` may pass a precomputed decomposition of H0(t) to avoid a
    second diagonalization; callers are responsible for consistency.
    """
    g = ramp_value(ramp, t)
    if isinstance(scheme, NoControl) or t == 0.0 or t == ramp.tau_q:
        dim = dimension(model)
        return np.zeros((dim, dim), dtype=complex)
    if h0_dec is None:
        h0_dec = eigendecompose(build_h0(model, g))
    h0_dot = ramp_rate(ramp, t) * dh0_dg(model)
    if isinstance(scheme, FullCD):
        return cd_full(h0_dec, h0_dot, policy)
    if isinstance(scheme, RestrictedCD):
        return cd_restricted(h0_dec, h0_dot, scheme.n, policy)
    raise TypeError(f"unknown control scheme {scheme!r}")


def generator(model: ModelSpec, ramp: RampProfile, scheme: ControlScheme, t: float,
              policy: DegeneracyPolicy = DegeneracyPolicy()) -> np.ndarray:
    """Full dynamical generator H0(t) + H1(t).

    At t = 0 and t = tau_q this is exactly H0(t): the control is forced to
    zero there even when the ramp velocity does not vanish.
    """
    h0 = build_h0(model, ramp_value(ramp, t))
    if isinstance(scheme, NoControl) or t == 0.0 or t == ramp.tau_q:
        return h0
    dec = eigendecompose(h0)
    return h0 + control_term(model, ramp, scheme, t, policy, h0_dec=dec)
