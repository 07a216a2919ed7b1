"""Numerical laboratory for diffusion-versus-absorption dichotomies.

The package integrates radially symmetric semilinear and degenerate
parabolic equations with time-dependent absorption, tracks flat
supersolutions and discrete comparison, classifies Dini-type integral
thresholds, computes very-singular-solution profiles, evaluates
localized energy functionals, and sweeps Dirac-approximation masses to
distinguish complete from single-point initial blow-up at desk scale.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ComparisonViolation,
    DiffabsError,
    DomainError,
    IncompleteSweepError,
    InsufficientDataError,
    InsufficientResolutionError,
    NotFoundError,
    NumericalFailure,
    StepFailure,
    WrongVariantError,
)
from .kernels import (  # noqa: F401
    AbsorptionKernel,
    DiniResult,
    OmegaSpec,
    ProblemSpec,
    ScanResult,
    H_integral,
    alpha_ell,
    dini_classify,
    ell_star,
    eval_U,
    eval_Utilde,
    eval_h,
    find_beta,
    lemma1_constant,
    theta_exponent,
    verify_subsolution_inequality,
)
from .rdsolver import (  # noqa: F401
    InitialData,
    RadialGrid,
    SolveResult,
    SolverOptions,
    heat_kernel,
    probe,
    solve,
    solve_comparison_pair,
)
from .selfsimilar import (  # noqa: F401
    ProfileResult,
    find_profile,
    residual,
    shoot,
    vss_field,
)
from .energy import (  # noqa: F401
    EnergyReport,
    ScheduleParams,
    ScheduleTable,
    energy_report,
    schedule,
)
from .dichotomy import (  # noqa: F401
    DEFAULT_THRESHOLDS,
    SweepTable,
    Verdict,
    classify,
    porous_sweep,
    sweep,
)
