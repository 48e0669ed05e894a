"""Pseudo-spectral laboratory for the two-component cubic peakon system."""

__version__ = "0.1.0"

from .integrator import (  # noqa: E402
    DEFAULT_CS,
    BlowUpError,
    SolveConfig,
    Trajectory,
    energy_ratio_monitor,
    lifespan,
    rk4_step,
    self_convergence_ratio,
    size_estimate_check,
    solve,
)
from .spectral import (  # noqa: E402
    Field,
    PeriodicGrid,
    bessel_apply,
    derivative,
    helmholtz_multiplier_dx,
    mollify,
    product,
    sobolev_norm,
)
from .systems import (  # noqa: E402
    State,
    conservative_rhs,
    mollified_rhs,
    peakon_profile,
    reformulated_rhs,
)
from .wellposed import (  # noqa: E402
    classify_gamma,
    classify_mu,
    continuity_experiment,
    exponent_continuity_audit,
    holder_sweep,
    mollifier_convergence_study,
    pt_symmetry_check,
)
