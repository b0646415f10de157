"""Prescribed Gaussian and geodesic curvature on the unit disk.

Solves  -lap u = 2 K e^u  on the disk with the nonlinear boundary condition
du/dn + 2 = 2 h e^{u/2}  on the circle, by direct minimization of a joint
energy in the conformal exponent u and a mass parameter rho that splits the
total curvature between the interior and the boundary.  Minimization runs on
symmetry-constrained finite element spaces; the limiting cases rho = 0 and
rho = 2*pi prescribe only the boundary or only the interior curvature.
"""

# NOTE: the `energy` function itself lives in the `diskcurv.energy` module
# and is not re-exported here so the module name stays importable.
from .energy import (
    EnergyBreakdown,
    energy_limit0,
    energy_limit2pi,
    f_correction,
    grad_rho,
    grad_u,
    log_area_integral,
    log_boundary_integral,
)
from .errors import (
    ConfigurationError,
    DiskcurvError,
    InfeasibleProblemError,
    InvalidFieldError,
    OutsideAdmissibleSetError,
)
from .fields import (
    CurvaturePair,
    CurvatureSpec,
    SymmetryGroup,
    is_symmetric,
    sample_curvatures,
    symmetrize,
    validate_fixed_point_free,
)
from .mesh import (
    DiskMesh,
    area_integral,
    boundary_integral,
    build_mesh,
    dirichlet_energy,
    solve_auxiliary_neumann,
)
from .solve import (
    SolveConfig,
    SolveResult,
    endpoint_exclusion_check,
    feasible_initializer,
    minimize_fixed_rho,
    minimize_joint,
    normalize_solution,
    solve_limit_0,
    solve_limit_2pi,
)

__version__ = "0.1.0"
