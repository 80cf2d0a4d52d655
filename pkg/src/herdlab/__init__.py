"""herdlab: herding planar evaders with a single spiral or circular pursuer.

Equilibria, linear stability and region-of-attraction estimates of the
rotating-frame dynamics, plus simulation and a scenario-driven CLI.
"""

from .equilibria import (
    Branch,
    CircularRoots,
    Equilibrium,
    cardano_roots,
    circular_roots,
    multi_evader_equilibrium,
    omega_for_radius,
    solve_circular,
    solve_spiral,
    stable_equilibrium,
)
from .errors import (
    AdmissibilityWarning,
    CertificationError,
    DomainError,
    EmptyIntersectionError,
    ExistenceError,
    FrameError,
    HerdlabError,
    ModelError,
    NoRootError,
    NotHurwitzError,
    ParseError,
    RangeError,
    SeedInfeasibleError,
    SingularityError,
    ValidationError,
)
from .integrate import (
    ConvergenceReport,
    IntegratorSettings,
    Termination,
    Trajectory,
    detect_convergence,
    integrate,
    simulate,
)
from .kernels import BACKEND
from .model import (
    FixedCartesian,
    FixedPolar,
    Frame,
    Mode,
    PursuitParams,
    RotatingCartesian,
    RotatingPolar,
    SwarmState,
    check_admissibility,
)
from .roa import (
    EllipsoidRegion,
    PiRoaResult,
    RegionMap,
    brute_force_region,
    equilibrium_region,
    lyapunov_seed,
    optimize_ellipsoid,
    pi_roa,
    stable_region_spiral,
)
from .stability import StabilityClass, StabilityVerdict, classify, eigenvalues_circular

__version__ = "0.1.0"

