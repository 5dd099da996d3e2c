"""Shared test oracles.

Everything here is intentionally independent of the package internals:
closed two-level formulas, brute-force Kronecker constructions, and plain
finite differences.  Tests compare package output against these routes.
"""

from __future__ import annotations

import numpy as np

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
I2 = np.eye(2, dtype=complex)

LN2 = float(np.log(2.0))


def lz_reference_distribution(delta: float, g0: float, g_d: float, tau_q: float,
                              t: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form controlled work distribution of the two-level model.

    The bare Hamiltonian points along (delta, 0, g)/2 on the Bloch sphere
    and the control term adds a y component h_y = -delta*gdot/(2(delta^2+g^2)).
    Both work outcomes and their weights follow from the angle between the
    bare ground state and the generator axis.
    """
    g = g0 + g_d * (t / tau_q)
    gdot = g_d / tau_q
    r = np.sqrt(delta * delta + g * g)
    r_init = np.sqrt(delta * delta + g0 * g0)
    if t == 0.0 or t == tau_q:
        return np.array([-r / 2.0 + r_init / 2.0]), np.array([1.0])
    h_y = -delta * gdot / (2.0 * r * r)
    big_r = np.sqrt(r * r / 4.0 + h_y * h_y)
    works = np.array([-big_r + r_init / 2.0, big_r + r_init / 2.0])
    x = (r / 2.0) / big_r
    probs = np.array([(1.0 + x) / 2.0, (1.0 - x) / 2.0])
    return works, probs


def kron_site(op: np.ndarray, site: int, length: int) -> np.ndarray:
    out = np.array([[1.0 + 0.0j]])
    for j in range(length):
        out = np.kron(out, op if j == site else I2)
    return out


def full_space_lmg(length: int, g: float) -> np.ndarray:
    """Brute-force fully connected model on all 2^L spins."""
    dim = 2 ** length
    h = np.zeros((dim, dim), dtype=complex)
    for i in range(length):
        h -= g * kron_site(SZ, i, length)
    for i in range(length):
        for j in range(i + 1, length):
            h -= (1.0 / length) * kron_site(SX, i, length) @ kron_site(SX, j, length)
    return h


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * 0.5 * (a + a.conj().T)


def total_variation(dist_a, dist_b, match_tol: float | None = None) -> float:
    """Total-variation distance between two discrete work distributions.

    Outcomes are matched greedily within ``match_tol``; unmatched weight
    counts in full.
    """
    if match_tol is None:
        match_tol = max(dist_a.merge_tol, dist_b.merge_tol, 1e-12)
    used = np.zeros(dist_b.works.size, dtype=bool)
    distance = 0.0
    for w, p in zip(dist_a.works, dist_a.probabilities):
        gaps = np.abs(dist_b.works - w)
        gaps[used] = np.inf
        k = int(np.argmin(gaps))
        if gaps[k] <= match_tol:
            used[k] = True
            distance += abs(p - dist_b.probabilities[k])
        else:
            distance += p
    distance += float(np.sum(dist_b.probabilities[~used]))
    return 0.5 * distance
