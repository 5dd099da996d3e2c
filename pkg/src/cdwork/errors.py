"""Exception types shared across the package."""


class CdworkError(Exception):
    """Base class for all computational failures raised by cdwork."""


class NonHermitianInput(CdworkError):
    """Operator fails the Hermiticity check."""


class SolverFailure(CdworkError):
    """Eigensolver did not converge or its output failed verification."""


class OutOfWindow(CdworkError):
    """Time argument lies outside the ramp window [0, tau_q]."""


class UnsupportedSize(CdworkError):
    """Model size outside the supported range."""


class DegenerateCoupling(CdworkError):
    """Counterdiabatic term is ill-defined: a (near-)degenerate level pair
    is coupled by the Hamiltonian derivative."""


class UnsupportedScheme(CdworkError):
    """Control scheme not valid for the requested operation."""


class StepTooCoarse(CdworkError):
    """Propagation step does not resolve the generator norm."""


class FlatTrace(CdworkError):
    """Entropy trace has no detectable crossover."""


class NoCrossing(CdworkError):
    """Ramp never reaches g = 0 inside its window."""


class NoRoot(CdworkError):
    """Crossover condition has no root inside the window."""


class DegenerateInput(CdworkError):
    """Fit input carries no usable spread."""


class MeanWorkGuardError(CdworkError):
    """Mean work drifted away from the adiabatic work inside an experiment."""
