"""Model Hamiltonians and ramp schedules.

Three driven models are supported, all with the field entering affinely:

* two-level avoided crossing:  H0(g) = (delta/2) sx + (g/2) sz
* transverse-field Ising chain, periodic boundaries:
      H0(g) = -sum_i [ g sz_i - sx_i sx_{i+1} ]      (site L+1 == site 1)
* fully connected (LMG) model, simulated in its maximal-spin sector of
  dimension L+1:
      H0(g) = -2 g Sz - (2/L) Sx^2 + 1/2
  which is the restriction of -g sum_i sz_i - (1/L) sum_{i<j} sx_i sx_j to
  the symmetric sector; the +1/2 offset keeps sector energies equal to the
  full-space ones.

Because every H0 is affine in g, the time derivative needed by the control
construction is dH0/dt = gdot * dH0/dg with a g-independent dH0/dg.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import OutOfWindow, UnsupportedSize

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class RampProfile:
    """Field schedule g(t) on the window [0, tau_q].

    linear:  g(t) = g0 + g_d * t / tau_q
    sine:    g(t) = g0 + g_d * sin^2(pi t / (2 tau_q))
    """

    kind: str
    g0: float
    g_d: float
    tau_q: float

    def __post_init__(self):
        if self.kind not in ("linear", "sine"):
            raise ValueError(f"unknown ramp kind {self.kind!r}; use 'linear' or 'sine'")
        if not (self.tau_q > 0.0):
            raise ValueError("tau_q must be positive")


def _check_window(ramp: RampProfile, t: float) -> None:
    if not (0.0 <= t <= ramp.tau_q):
        raise OutOfWindow(f"t = {t} outside ramp window [0, {ramp.tau_q}]")


def ramp_value(ramp: RampProfile, t: float) -> float:
    """Field value g(t); t must lie inside the ramp window."""
    _check_window(ramp, t)
    if ramp.kind == "linear":
        return ramp.g0 + ramp.g_d * (t / ramp.tau_q)
    return ramp.g0 + ramp.g_d * np.sin(np.pi * t / (2.0 * ramp.tau_q)) ** 2


def ramp_rate(ramp: RampProfile, t: float) -> float:
    """Field velocity gdot(t); t must lie inside the ramp window."""
    _check_window(ramp, t)
    if ramp.kind == "linear":
        return ramp.g_d / ramp.tau_q
    return ramp.g_d * (np.pi / (2.0 * ramp.tau_q)) * np.sin(np.pi * t / ramp.tau_q)


@dataclass(frozen=True)
class LZ:
    """Two-level model with minimal gap delta at g = 0."""

    delta: float

    def __post_init__(self):
        if self.delta < 0.0:
            raise ValueError("delta must be non-negative")


@dataclass(frozen=True)
class IsingChain:
    """Transverse-field Ising chain with periodic boundaries.

    L >= 3: with two sites the periodic bond sum would traverse the same
    bond twice, which has no unambiguous convention.
    """

    length: int

    def __post_init__(self):
        if self.length < 3:
            raise UnsupportedSize("Ising chain requires length >= 3")


@dataclass(frozen=True)
class LMG:
    """Fully connected spin model, maximal-spin sector (dimension L + 1)."""

    length: int

    def __post_init__(self):
        if self.length < 2:
            raise UnsupportedSize("LMG model requires length >= 2")


ModelSpec = LZ | IsingChain | LMG


def dimension(model: ModelSpec) -> int:
    """Hilbert-space dimension in which the model is simulated."""
    if isinstance(model, LZ):
        return 2
    if isinstance(model, IsingChain):
        return 2 ** model.length
    if isinstance(model, LMG):
        return model.length + 1
    raise TypeError(f"unknown model spec {model!r}")


def _site_operator(op: np.ndarray, site: int, length: int) -> np.ndarray:
    factors = [IDENTITY_2] * length
    factors[site] = op
    out = factors[0]
    for factor in factors[1:]:
        out = np.kron(out, factor)
    return out


@lru_cache(maxsize=None)
def _collective_spin(length: int) -> tuple[np.ndarray, np.ndarray]:
    """(Sz, Sx) on the spin-L/2 sector; index 0 is the m = +L/2 state."""
    j = length / 2.0
    dim = length + 1
    m = j - np.arange(dim)
    sz = np.diag(m.astype(complex))
    lowering = np.zeros((dim, dim), dtype=complex)
    for i in range(dim - 1):
        lowering[i + 1, i] = np.sqrt(j * (j + 1.0) - m[i] * (m[i] - 1.0))
    sx = 0.5 * (lowering + lowering.conj().T)
    return sz, sx


@lru_cache(maxsize=None)
def _h0_parts(model: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
    """(constant part, field part) with H0(g) = constant + g * field."""
    if isinstance(model, LZ):
        constant = 0.5 * model.delta * SIGMA_X
        field = 0.5 * SIGMA_Z
    elif isinstance(model, IsingChain):
        length = model.length
        dim = 2 ** length
        constant = np.zeros((dim, dim), dtype=complex)
        field = np.zeros((dim, dim), dtype=complex)
        for i in range(length):
            constant += _site_operator(SIGMA_X, i, length) @ _site_operator(
                SIGMA_X, (i + 1) % length, length
            )
            field -= _site_operator(SIGMA_Z, i, length)
    elif isinstance(model, LMG):
        sz, sx = _collective_spin(model.length)
        constant = -(2.0 / model.length) * (sx @ sx) + 0.5 * np.eye(
            model.length + 1, dtype=complex
        )
        field = -2.0 * sz
    else:
        raise TypeError(f"unknown model spec {model!r}")
    constant.setflags(write=False)
    field.setflags(write=False)
    return constant, field


def build_h0(model: ModelSpec, g: float) -> np.ndarray:
    """Bare Hamiltonian at field value g."""
    if not np.isfinite(g):
        raise ValueError("field value g must be finite")
    if isinstance(model, IsingChain) and model.length < 3:
        raise UnsupportedSize("Ising chain requires length >= 3")
    constant, field = _h0_parts(model)
    return constant + g * field


def dh0_dg(model: ModelSpec) -> np.ndarray:
    """Field derivative dH0/dg; exact because every H0 is affine in g."""
    return _h0_parts(model)[1].copy()
