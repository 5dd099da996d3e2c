"""Central numerical tolerance record.

All dimensions handled here stay below a few hundred, so conditioning is
benign and the bounds below are comfortable for double precision.
Magnitude-scaled bounds are written as ``TOL * (1 + max|A|)`` at the call
site.
"""

# spectral kernel
HERMITICITY = 1e-12        # scaled by (1 + max|A|)
RECONSTRUCTION = 1e-10     # scaled by (1 + max|A|)
ORTHONORMALITY = 1e-10
UNITARITY = 1e-10

# control term
GAP_TOL_DEFAULT = 1e-9
COUPLING_TOL_DEFAULT = 1e-9

# work distributions
PROBABILITY_NORMALIZATION = 1e-12
MERGE_TOL_SCALE = 1e-9     # default merge tol = scale * spectral range
PROBABILITY_FLOOR = 1e-14  # outcomes below this weight are dropped

# propagation
STEP_NORM_BOUND = 0.1      # require dt * max||H|| <= this
TRAJECTORY_NORM_DRIFT = 1e-9
PRESCAN_POINTS = 101

# analysis
FLAT_TRACE = 1e-12
BISECTION_TOL = 1e-10
MEAN_WORK_GUARD = 1e-8     # scaled by (1 + |adiabatic work|)
