"""Free Stein kernels, discrepancies and Poincare constants.

Words are tuples of 0-based generator indices.
"""

from ._freestein import (
    BudgetExceededError,
    FreesteinError,
    InadmissibleError,
    InvalidStateError,
    KernelMatrix,
    Poly,
    State,
    TensorPoly,
    Tolerances,
    biane_gap_check,
    catalan,
    centering_defect,
    clt_rate_csv,
    cumulant_state,
    cyclic_derivative,
    cyclic_gradient,
    delta,
    explicit_distance,
    explicit_kernel,
    free_poisson,
    involution,
    jacobian,
    minimal_kernel,
    moment_table,
    monte_carlo,
    nc_partitions,
    partial,
    poincare_lower_bound,
    semicircular,
    sharp,
    standard_error,
    state_from_json,
    stein_report,
    stein_residual,
    voiculescu_bound,
)

__version__ = "0.1.0"
