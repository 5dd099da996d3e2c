"""Entropy traces, crossover detection, scaling fits, and the control
comparison experiments.

The entropy of the controlled work distribution separates a drive into a
near-adiabatic region (delta-peaked distribution, entropy near zero) and an
impulse-like region around the crossing where the distribution broadens.
The crossover instant t* is located where the entropy changes fastest on
the entry flank, and the impulse width |t_c - t*| is fit against the quench
duration on a log-log grid.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import tolerances as tol
from .control import ControlScheme, DegeneracyPolicy, FullCD, RestrictedCD
from .errors import (
    DegenerateInput,
    FlatTrace,
    MeanWorkGuardError,
    NoCrossing,
    NoRoot,
)
from .models import LZ, IsingChain, LMG, ModelSpec, RampProfile, dimension, ramp_value
from .workstats import adiabatic_work, mean_work, shannon_entropy, tpm_distribution


@dataclass(frozen=True)
class EntropyTrace:
    """Work-distribution entropy sampled along a drive.

    ``times`` is strictly increasing over [0, tau_q]; uniform and locally
    refined grids are both allowed.
    """

    times: np.ndarray
    entropies: np.ndarray
    model: ModelSpec
    ramp: RampProfile
    scheme: ControlScheme

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        entropies = np.asarray(self.entropies, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "entropies", entropies)
        if times.shape != entropies.shape or times.ndim != 1:
            raise ValueError("times and entropies must be matching 1-d arrays")
        if times.size >= 2 and np.any(np.diff(times) <= 0.0):
            raise ValueError("times must increase strictly")
        bound = math.log(dimension(self.model)) + 1e-12
        if np.any(entropies < 0.0) or np.any(entropies > bound):
            raise ValueError("entropy samples must lie in [0, ln(dim)]")

    @property
    def tau_q(self) -> float:
        return self.ramp.tau_q


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares power law y = prefactor * x**exponent."""

    exponent: float
    prefactor: float
    r_squared: float


@dataclass(frozen=True)
class KZPoint:
    """Per-quench crossover record of the scaling experiment."""

    tau_q: float
    t_star: float
    t_c: float
    width: float


@dataclass(frozen=True)
class CompareCell:
    """One grid cell of the full-vs-restricted control comparison."""

    axis_value: float
    t: float
    h_full: float
    h_restricted: float
    mean_w: float
    adiabatic_w: float


def crossing_time(ramp: RampProfile) -> float:
    """Time t_c at which g(t_c) = 0, if the ramp crosses zero in its window."""
    if ramp.kind == "linear":
        if ramp.g_d == 0.0:
            raise NoCrossing("constant ramp never crosses g = 0")
        t_c = -ramp.g0 * ramp.tau_q / ramp.g_d
        if not (0.0 <= t_c <= ramp.tau_q):
            raise NoCrossing(f"linear ramp crosses g = 0 at t = {t_c}, outside the window")
        return float(t_c)
    if ramp.g_d == 0.0:
        raise NoCrossing("constant ramp never crosses g = 0")
    x = -ramp.g0 / ramp.g_d
    if not (0.0 <= x <= 1.0):
        raise NoCrossing("sine ramp never reaches g = 0 inside the window")
    return float((2.0 * ramp.tau_q / np.pi) * np.arcsin(np.sqrt(x)))


def _entropy_values(model: ModelSpec, ramp: RampProfile, scheme: ControlScheme,
                    times: np.ndarray, policy: DegeneracyPolicy,
                    merge_tol: float | None) -> np.ndarray:
    return np.array([
        shannon_entropy(tpm_distribution(model, ramp, scheme, float(t), policy, merge_tol))
        for t in times
    ])


def entropy_trace(model: ModelSpec, ramp: RampProfile, scheme: ControlScheme,
                  grid_points: int, policy: DegeneracyPolicy = DegeneracyPolicy(),
                  merge_tol: float | None = None) -> EntropyTrace:
    """Entropy of the controlled work distribution on a uniform time grid."""
    if grid_points < 100:
        raise ValueError("grid_points must be at least 100")
    times = np.linspace(0.0, ramp.tau_q, grid_points)
    values = _entropy_values(model, ramp, scheme, times, policy, merge_tol)
    return EntropyTrace(times, values, model, ramp, scheme)


def _parabolic_vertex(x: np.ndarray, y: np.ndarray) -> float:
    """Vertex abscissa of the parabola through three points; x[1] on failure."""
    x0, x1, x2 = x
    y0, y1, y2 = y
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    if denom == 0.0:
        return float(x1)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    if a >= 0.0:
        return float(x1)
    vertex = -b / (2.0 * a)
    return float(min(max(vertex, x0), x2))


def crossover_time(trace: EntropyTrace, flank: str = "entry") -> float:
    """Instant of maximal entropy rate of change on one flank of the crossing.

    The rate is a centered finite difference on the (possibly non-uniform)
    sample grid, restricted to t < t_c on the entry flank (t > t_c with the
    sign flipped on the exit flank), refined by parabolic interpolation
    through the three samples around the discrete maximum.  Ramps without a
    zero crossing use all interior samples.
    """
    if flank not in ("entry", "exit"):
        raise ValueError("flank must be 'entry' or 'exit'")
    t = trace.times
    h = trace.entropies
    if t.size < 3:
        raise ValueError("crossover detection needs at least 3 samples")
    rates = (h[2:] - h[:-2]) / (t[2:] - t[:-2])
    mid = t[1:-1]
    try:
        t_c = crossing_time(trace.ramp)
    except NoCrossing:
        t_c = None
    if t_c is None:
        mask = np.ones(mid.size, dtype=bool)
    elif flank == "entry":
        mask = mid < t_c
    else:
        mask = mid > t_c
    if not np.any(mask):
        raise ValueError(f"no interior samples on the {flank} flank")
    signal = rates if flank == "entry" else -rates
    if float(np.max(np.abs(rates[mask]))) < tol.FLAT_TRACE:
        raise FlatTrace("entropy trace is flat; no crossover detectable")
    candidates = np.flatnonzero(mask)
    k = candidates[int(np.argmax(signal[candidates]))]
    if k - 1 in candidates and k + 1 in candidates:
        return _parabolic_vertex(mid[k - 1:k + 2], signal[k - 1:k + 2])
    return float(mid[k])


def impulse_width(trace: EntropyTrace, ramp: RampProfile, flank: str = "entry") -> float:
    """Impulse-regime size |t_c - t*| for a ramp crossing g = 0."""
    t_c = crossing_time(ramp)
    t_star = crossover_time(trace, flank)
    return abs(t_c - t_star)


def adiabatic_impulse_times(delta: float, ramp: RampProfile, alpha: float = 1.0
                            ) -> tuple[float, float]:
    """Crossover instants where gap(t) * |t - t_c| = alpha on each side of t_c.

    The gap is the two-level spectral gap sqrt(delta^2 + g(t)^2) of a linear
    ramp through the avoided crossing; roots are bisected to 1e-10 absolute.
    """
    if ramp.kind != "linear":
        raise ValueError("adiabatic-impulse times are defined for linear ramps")
    if not (alpha > 0.0):
        raise ValueError("alpha must be positive")
    t_c = crossing_time(ramp)

    def residual(t: float) -> float:
        g = ramp_value(ramp, t)
        return math.sqrt(delta * delta + g * g) * abs(t - t_c) - alpha

    def bisect(lo: float, hi: float) -> float:
        flo, fhi = residual(lo), residual(hi)
        if flo * fhi > 0.0:
            raise NoRoot(
                f"gap * |t - t_c| never reaches alpha = {alpha} on [{lo:.6g}, {hi:.6g}]"
            )
        while hi - lo > tol.BISECTION_TOL:
            mid = 0.5 * (lo + hi)
            fmid = residual(mid)
            if flo * fmid <= 0.0:
                hi, fhi = mid, fmid
            else:
                lo, flo = mid, fmid
        return 0.5 * (lo + hi)

    t_minus = bisect(0.0, t_c)
    t_plus = bisect(t_c, ramp.tau_q)
    return t_minus, t_plus


def fit_power_law(pairs) -> PowerLawFit:
    """Least-squares line on (ln x, ln y); needs >= 5 strictly positive pairs."""
    data = np.asarray(list(pairs), dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError("pairs must be a sequence of (x, y) tuples")
    if data.shape[0] < 5:
        raise ValueError("power-law fit needs at least 5 pairs")
    if np.any(data <= 0.0):
        raise ValueError("power-law fit needs strictly positive values")
    x, y = data[:, 0], data[:, 1]
    if np.all(x == x[0]):
        raise DegenerateInput("all x values are equal; exponent is undetermined")
    lx, ly = np.log(x), np.log(y)
    dx = lx - lx.mean()
    dy = ly - ly.mean()
    slope = float(np.sum(dx * dy) / np.sum(dx * dx))
    intercept = float(ly.mean() - slope * lx.mean())
    residuals = ly - (slope * lx + intercept)
    ss_res = float(np.sum(residuals ** 2))
    ss_tot = float(np.sum(dy ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return PowerLawFit(slope, math.exp(intercept), r_squared)


def _refined_times(tau_q: float, t_c: float, width_estimate: float,
                   grid_points: int) -> np.ndarray:
    """Uniform base grid plus a 5x denser window of +-5 widths around t_c."""
    coarse = np.linspace(0.0, tau_q, grid_points)
    if width_estimate <= 0.0:
        width_estimate = tau_q / grid_points
    lo = max(0.0, t_c - 5.0 * width_estimate)
    hi = min(tau_q, t_c + 5.0 * width_estimate)
    fine = np.linspace(lo, hi, 5 * grid_points)
    return np.unique(np.concatenate([coarse, fine]))


def _kz_point(delta: float, g0: float, g_d: float, tau_q: float, grid_points: int,
              policy: DegeneracyPolicy, merge_tol: float | None, flank: str) -> KZPoint:
    model = LZ(delta)
    ramp = RampProfile("linear", g0, g_d, tau_q)
    scheme = FullCD()
    t_c = crossing_time(ramp)
    try:
        coarse = np.linspace(0.0, tau_q, grid_points)
        trace = EntropyTrace(
            coarse, _entropy_values(model, ramp, scheme, coarse, policy, merge_tol),
            model, ramp, scheme,
        )
        estimate = abs(t_c - crossover_time(trace, flank))
        times = _refined_times(tau_q, t_c, estimate, grid_points)
        trace = EntropyTrace(
            times, _entropy_values(model, ramp, scheme, times, policy, merge_tol),
            model, ramp, scheme,
        )
        t_star = crossover_time(trace, flank)
    except FlatTrace as exc:
        raise FlatTrace(f"flat entropy trace at tau_q = {tau_q}: {exc}") from exc
    return KZPoint(tau_q, t_star, t_c, abs(t_c - t_star))


def _kz_point_args(args) -> KZPoint:
    return _kz_point(*args)


def kz_scaling_experiment(delta: float, g0: float, g_d: float, tau_list,
                          grid_points: int,
                          policy: DegeneracyPolicy = DegeneracyPolicy(),
                          merge_tol: float | None = None, flank: str = "entry",
                          workers: int = 1) -> tuple[list[KZPoint], PowerLawFit]:
    """Impulse-width scaling across a grid of quench durations.

    For each tau_q the entropy trace (with local refinement around the
    crossing) yields t*, and the widths |t_c - t*| are fit to a power law in
    tau_q.  A flat trace aborts the experiment naming the offending tau_q.
    """
    taus = [float(tau) for tau in tau_list]
    if any(tau <= 0.0 for tau in taus):
        raise ValueError("every tau_q must be positive")
    argument_rows = [
        (delta, g0, g_d, tau, grid_points, policy, merge_tol, flank) for tau in taus
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_kz_point_args, argument_rows))
    else:
        points = [_kz_point_args(row) for row in argument_rows]
    fit = fit_power_law([(p.tau_q, p.width) for p in points])
    return points, fit


def _compare_cells(args) -> list[CompareCell]:
    model, ramp, axis_value, grid_points, policy, merge_tol = args
    full = FullCD()
    restricted = RestrictedCD(0)
    times = np.linspace(0.0, ramp.tau_q, grid_points)
    cells = []
    for t in times:
        t = float(t)
        dist_full = tpm_distribution(model, ramp, full, t, policy, merge_tol)
        dist_restricted = tpm_distribution(model, ramp, restricted, t, policy, merge_tol)
        reference = adiabatic_work(model, ramp, t)
        for label, dist in (("full", dist_full), ("restricted", dist_restricted)):
            drift = abs(mean_work(dist) - reference)
            if drift > tol.MEAN_WORK_GUARD * (1.0 + abs(reference)):
                raise MeanWorkGuardError(
                    f"mean work of the {label} scheme drifted {drift:.3e} from the "
                    f"adiabatic work at axis value {axis_value}, t = {t}"
                )
        cells.append(CompareCell(
            axis_value, t,
            shannon_entropy(dist_full), shannon_entropy(dist_restricted),
            mean_work(dist_full), reference,
        ))
    return cells


def compare_controls(model: ModelSpec, ramp: RampProfile, sweep_values, sweep_axis: str,
                     grid_points: int, policy: DegeneracyPolicy = DegeneracyPolicy(),
                     merge_tol: float | None = None, workers: int = 1
                     ) -> list[CompareCell]:
    """Full-vs-restricted control entropies over a parameter sweep.

    ``sweep_axis`` is ``"tau_q"`` (the ramp duration varies) or ``"length"``
    (the system size varies).  Every cell carries both entropies plus the
    mean and adiabatic works; the mean-work/adiabatic-work identity is
    asserted cell by cell as a guard.  The reported mean is the full
    scheme's (the restricted one is guarded to agree).
    """
    if not isinstance(model, (IsingChain, LMG)):
        raise ValueError("control comparison supports the Ising and LMG models")
    if sweep_axis not in ("tau_q", "length"):
        raise ValueError("sweep_axis must be 'tau_q' or 'length'")
    if grid_points < 100:
        raise ValueError("grid_points must be at least 100")
    jobs = []
    for value in sweep_values:
        if sweep_axis == "tau_q":
            jobs.append((model, replace(ramp, tau_q=float(value)), float(value),
                         grid_points, policy, merge_tol))
        else:
            jobs.append((replace(model, length=int(value)), ramp, float(value),
                         grid_points, policy, merge_tol))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_compare_cells, jobs))
    else:
        blocks = [_compare_cells(job) for job in jobs]
    return [cell for block in blocks for cell in block]
