"""Python interface to the ucplab C++ core."""

from ._ucplab import (
    Arrangement,
    ConvergenceError,
    CoverageError,
    Domain,
    Grid,
    InvalidArgument,
    Operator,
    SpectralBasis,
    arrangement,
    carleman_psi,
    experiment_names,
    extension_residual,
    indicator,
    klein_gamma,
    project,
    random_potential,
    ratio,
    reconstruct,
    run_experiment,
    s_case,
    schrodinger,
    sfuc_bound,
    sinc,
    spectrum,
    uncertainty_constant,
    verify_aliasing,
    weight_violations,
)

__all__ = [name for name in dir() if not name.startswith("_")]
