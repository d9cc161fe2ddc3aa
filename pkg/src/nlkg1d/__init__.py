"""Standing waves of the 1-D quartic-sextic Klein-Gordon field.

Profiles, charge-curve bifurcation structure, constrained Hessian spectra
and direct time integration with orbital-stability diagnostics.
"""

from .bifurcation import (
    BifurcationReport,
    Branch,
    LevelClassification,
    branch_inverse,
    classify,
    critical_omegas,
    energy_e,
    g1_g2,
    k1,
    k2,
    k2_prime,
    k2_second,
    regime_of,
    sigma,
    sigma2,
    sigma_prime,
    tau_star,
)
from .errors import (
    ConvergenceFailure,
    DomainViolation,
    Error,
    GridMismatch,
    IntegrationBlowup,
    NonPositiveCoefficient,
    NumericBlowup,
    PreconditionViolation,
    RegimeViolation,
    ToleranceFailure,
)
from .model import FrequencyWindow, ModelParams
from .profiles import (
    Profile,
    ProfileEnergy,
    SpatialGrid,
    closed_form,
    closed_form_values,
    default_grid,
    first_integral_residual,
    shoot,
)
from .profiles import charge as profile_charge
from .profiles import energy as profile_energy
from .simulator import (
    FieldState,
    PeriodicGrid,
    SimConfig,
    TimeSeries,
    default_config,
    init_state,
    orbital_distance,
    run,
    step,
)
from .spectral import HessianSystem, assemble, constrained_min_eig, constrained_min_mode

__version__ = "0.1.0"
