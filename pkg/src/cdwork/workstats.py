"""Two-point-measurement work distributions of controlled drives.

The drive starts in the ground state of the bare Hamiltonian, so the first
energy measurement is deterministic.  Under full or ground-state-restricted
counterdiabatic control the evolved state equals the instantaneous ground
state |phi_0(t)> exactly, which collapses the conditional probabilities of
the second measurement to overlaps with the eigenstates |Phi_m(t)> of the
full generator H0 + H1:

    P(W_m) = |<Phi_m(t)|phi_0(t)>|^2,   W_m = E_m(t) - eps_0(0).

Degenerate generator levels are merged into a single work outcome before
any entropy is computed, otherwise the entropy would be inflated by
artificial splitting.  The merged outcome sits at the probability-weighted
mean of its members, which preserves the mean work exactly.  Entropies are
in nats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances as tol
from .control import ControlScheme, DegeneracyPolicy, FullCD, RestrictedCD, control_term
from .errors import UnsupportedScheme
from .models import ModelSpec, RampProfile, build_h0, ramp_value
from .spectral import SpectralDecomposition, eigendecompose


@dataclass(frozen=True)
class WorkDistribution:
    """Discrete work distribution: ascending distinct works with weights."""

    works: np.ndarray
    probabilities: np.ndarray
    merge_tol: float

    def __post_init__(self):
        works = np.asarray(self.works, dtype=float)
        probabilities = np.asarray(self.probabilities, dtype=float)
        object.__setattr__(self, "works", works)
        object.__setattr__(self, "probabilities", probabilities)
        if works.shape != probabilities.shape or works.ndim != 1 or works.size == 0:
            raise ValueError("works and probabilities must be matching 1-d arrays")
        if np.any(probabilities < 0.0):
            raise ValueError("probabilities must be non-negative")
        total = float(probabilities.sum())
        if abs(total - 1.0) > tol.PROBABILITY_NORMALIZATION:
            raise ValueError(f"probabilities sum to {total}, not 1")
        if works.size > 1 and np.any(np.diff(works) <= self.merge_tol):
            raise ValueError("work values must ascend with gaps above merge_tol")


def merge_outcomes(works, probabilities, merge_tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Cluster outcomes closer than ``merge_tol``.

    Single ascending sweep; each cluster is replaced by its
    probability-weighted mean.  Idempotent: output gaps exceed merge_tol.
    """
    works = np.asarray(works, dtype=float)
    probabilities = np.asarray(probabilities, dtype=float)
    order = np.argsort(works, kind="stable")
    merged_w: list[float] = []
    merged_p: list[float] = []
    for w, p in zip(works[order], probabilities[order]):
        if merged_w and w - merged_w[-1] <= merge_tol:
            total = merged_p[-1] + p
            if total > 0.0:
                merged_w[-1] += (w - merged_w[-1]) * (p / total)
            merged_p[-1] = total
        else:
            merged_w.append(float(w))
            merged_p.append(float(p))
    return np.array(merged_w), np.array(merged_p)


def distribution_from_state(state, generator_dec: SpectralDecomposition,
                            initial_energy: float,
                            merge_tol: float | None = None) -> WorkDistribution:
    """Work distribution of a normalized state in the generator eigenbasis.

    Outcomes carrying less than the probability floor are dropped and the
    remainder renormalized; the default merge tolerance scales with the
    generator's spectral range so behavior is size independent.
    """
    amplitudes = generator_dec.eigenvectors.conj().T @ np.asarray(state, dtype=complex)
    probabilities = np.abs(amplitudes) ** 2
    works = generator_dec.eigenvalues - initial_energy
    if merge_tol is None:
        span = float(generator_dec.eigenvalues[-1] - generator_dec.eigenvalues[0])
        merge_tol = tol.MERGE_TOL_SCALE * span
    keep = probabilities >= tol.PROBABILITY_FLOOR
    if not np.any(keep):
        raise ValueError("state carries no weight above the probability floor")
    works, probabilities = merge_outcomes(works[keep], probabilities[keep], merge_tol)
    probabilities = probabilities / probabilities.sum()
    return WorkDistribution(works, probabilities, merge_tol)


def tpm_distribution(model: ModelSpec, ramp: RampProfile, scheme: ControlScheme, t: float,
                     policy: DegeneracyPolicy = DegeneracyPolicy(),
                     merge_tol: float | None = None) -> WorkDistribution:
    """Work distribution at time t of a controlled drive from the ground state.

    Valid for FullCD and RestrictedCD(0) only: the eigenbasis-overlap
    shortcut assumes the evolved state tracks the instantaneous ground
    state.  Uncontrolled evolutions need the explicit propagator in the
    dynamics module.
    """
    if isinstance(scheme, RestrictedCD) and scheme.n != 0:
        raise UnsupportedScheme(
            "restricted control must target the ground state (n = 0) for the "
            "tracking shortcut to apply"
        )
    if not isinstance(scheme, (FullCD, RestrictedCD)):
        raise UnsupportedScheme(
            f"{type(scheme).__name__} evolutions do not track the ground state; "
            "propagate explicitly via the dynamics module"
        )
    g = ramp_value(ramp, t)
    h0 = build_h0(model, g)
    dec_now = eigendecompose(h0)
    h1 = control_term(model, ramp, scheme, t, policy, h0_dec=dec_now)
    generator_dec = eigendecompose(h0 + h1)
    initial_dec = eigendecompose(build_h0(model, ramp_value(ramp, 0.0)))
    return distribution_from_state(
        dec_now.eigenvectors[:, 0], generator_dec, float(initial_dec.eigenvalues[0]),
        merge_tol,
    )


def shannon_entropy(distribution: WorkDistribution) -> float:
    """Shannon entropy of the work distribution in nats (0 ln 0 := 0)."""
    p = distribution.probabilities
    positive = p > 0.0
    return float(-np.sum(p[positive] * np.log(p[positive])))


def mean_work(distribution: WorkDistribution) -> float:
    return float(np.sum(distribution.probabilities * distribution.works))


def work_variance(distribution: WorkDistribution) -> float:
    mean = mean_work(distribution)
    return float(np.sum(distribution.probabilities * (distribution.works - mean) ** 2))


def adiabatic_work(model: ModelSpec, ramp: RampProfile, t: float) -> float:
    """Ground-state energy difference eps_0(t) - eps_0(0) of the bare drive."""
    now = eigendecompose(build_h0(model, ramp_value(ramp, t)))
    start = eigendecompose(build_h0(model, ramp_value(ramp, 0.0)))
    return float(now.eigenvalues[0] - start.eigenvalues[0])
