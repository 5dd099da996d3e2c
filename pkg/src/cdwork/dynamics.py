"""Time-ordered propagation oracle.

This module deliberately avoids the eigenbasis-overlap shortcut used by
workstats: states are advanced step by step with the midpoint exponential
integrator

    psi(t + dt) = exp(-i H(t + dt/2) dt) psi(t),

which is unitary per step by construction (exponential of a Hermitian
matrix) and globally second order.  Comparing its output against the
shortcut is the decisive end-to-end check that controlled evolutions track
the instantaneous ground state; it is also the only route for uncontrolled
drives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances as tol
from .control import ControlScheme, DegeneracyPolicy, generator
from .errors import StepTooCoarse
from .models import ModelSpec, RampProfile, build_h0, ramp_value
from .spectral import apply_unitary_step, eigendecompose


@dataclass(frozen=True)
class Trajectory:
    """Propagated trajectory: times[k] carries state states[k]."""

    times: np.ndarray
    states: np.ndarray


def _max_generator_norm(model: ModelSpec, ramp: RampProfile, scheme: ControlScheme,
                        policy: DegeneracyPolicy) -> float:
    """Coarse pre-scan of the generator's spectral norm over the window.

    The control term can be large near avoided crossings for fast quenches;
    silent under-resolution would corrupt the oracle, hence the scan.
    """
    times = np.linspace(0.0, ramp.tau_q, tol.PRESCAN_POINTS)
    largest = 0.0
    for t in times:
        h = generator(model, ramp, scheme, float(t), policy)
        largest = max(largest, float(np.max(np.abs(np.linalg.eigvalsh(h)))))
    return largest


def propagate(model: ModelSpec, ramp: RampProfile, scheme: ControlScheme, steps: int,
              policy: DegeneracyPolicy = DegeneracyPolicy()) -> Trajectory:
    """Propagate the ground state of H0(0) across the full ramp window.

    Raises StepTooCoarse unless dt * max||H|| stays below the resolution
    bound, with the norm taken from a coarse pre-scan.
    """
    if steps < 1:
        raise ValueError("steps must be a positive integer")
    dt = ramp.tau_q / steps
    norm = _max_generator_norm(model, ramp, scheme, policy)
    if dt * norm > tol.STEP_NORM_BOUND:
        needed = int(np.ceil(ramp.tau_q * norm / tol.STEP_NORM_BOUND))
        raise StepTooCoarse(
            f"dt * max||H|| = {dt * norm:.3g} exceeds {tol.STEP_NORM_BOUND}; "
            f"use at least {needed} steps"
        )

    start = eigendecompose(build_h0(model, ramp_value(ramp, 0.0)))
    psi = start.eigenvectors[:, 0].copy()
    times = np.linspace(0.0, ramp.tau_q, steps + 1)
    states = np.empty((steps + 1, psi.size), dtype=complex)
    states[0] = psi
    for k in range(steps):
        midpoint = (k + 0.5) * dt
        h = generator(model, ramp, scheme, midpoint, policy)
        psi = apply_unitary_step(eigendecompose(h), dt, psi)
        states[k + 1] = psi
    return Trajectory(times, states)


def tracking_fidelity(trajectory: Trajectory, model: ModelSpec, ramp: RampProfile,
                      chunk: int = 2048) -> tuple[np.ndarray, np.ndarray]:
    """Instantaneous ground-state fidelity |<phi_0(t)|psi(t)>|^2 per sample.

    Batched over chunks to keep the stacked eigensolver memory bounded.
    """
    times = trajectory.times
    fidelities = np.empty(times.size)
    for lo in range(0, times.size, chunk):
        hi = min(lo + chunk, times.size)
        stack = np.stack([build_h0(model, ramp_value(ramp, float(t))) for t in times[lo:hi]])
        _, vectors = np.linalg.eigh(stack)
        ground = vectors[:, :, 0]
        overlaps = np.einsum("ij,ij->i", ground.conj(), trajectory.states[lo:hi])
        fidelities[lo:hi] = np.abs(overlaps) ** 2
    return times.copy(), fidelities
