"""Work statistics of counterdiabatically controlled quantum drives.

The package simulates driven quantum models (a two-level avoided crossing,
a periodic transverse-field Ising chain, and the fully connected LMG model)
under counterdiabatic control, builds the two-point-measurement work
distribution along the drive, and analyzes its Shannon entropy: crossover
detection, impulse-width scaling in the quench duration, and comparisons
between the full and single-eigenstate control terms.
"""

from .analysis import (
    CompareCell,
    EntropyTrace,
    KZPoint,
    PowerLawFit,
    adiabatic_impulse_times,
    compare_controls,
    crossing_time,
    crossover_time,
    entropy_trace,
    fit_power_law,
    impulse_width,
    kz_scaling_experiment,
)
from .control import (
    ControlScheme,
    DegeneracyPolicy,
    FullCD,
    NoControl,
    RestrictedCD,
    cd_full,
    cd_restricted,
    control_term,
    generator,
)
from .dynamics import Trajectory, propagate, tracking_fidelity
from .errors import (
    CdworkError,
    DegenerateCoupling,
    DegenerateInput,
    FlatTrace,
    MeanWorkGuardError,
    NoCrossing,
    NonHermitianInput,
    NoRoot,
    OutOfWindow,
    SolverFailure,
    StepTooCoarse,
    UnsupportedScheme,
    UnsupportedSize,
)
from .models import (
    LZ,
    IsingChain,
    LMG,
    ModelSpec,
    RampProfile,
    build_h0,
    dh0_dg,
    dimension,
    ramp_rate,
    ramp_value,
)
from .spectral import SpectralDecomposition, eigendecompose, unitary_step
from .workstats import (
    WorkDistribution,
    adiabatic_work,
    distribution_from_state,
    mean_work,
    merge_outcomes,
    shannon_entropy,
    tpm_distribution,
    work_variance,
)

__version__ = "0.1.0"
