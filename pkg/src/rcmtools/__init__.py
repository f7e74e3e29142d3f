"""Numerical toolkit for the random cluster model on the complete graph.

Closed-form large-deviation rate functions and the phase diagram, an exact
small-n enumeration oracle, the tree-polynomial variational machinery, and
a heat-bath MCMC sampler, cross-validated against each other.
"""

__version__ = "0.1.0"

from .errors import (
    CriticalPointError,
    DomainError,
    EnumerationLimitError,
    EvaluationRangeError,
)
from .oracle import (
    ComponentSummary,
    EdgeConfiguration,
    ExactReport,
    ModelParams,
    component_summary,
    enumerate_report,
    finite_rate_table,
    largest_size_distribution,
    uniqueness_check,
    weight,
)
from .rates import (
    PhasePoint,
    RateCurve,
    RatePoint,
    acyclic_rate,
    connected_rate,
    entropy,
    free_energy,
    g,
    lambda_c,
    mean_field_roots,
    phase_point,
    phi,
    phi_sup,
    pi1,
    psi,
    rate_curve,
    theta_star,
    xi,
)
from .sampler import (
    ChainConfig,
    HeatBathChain,
    SampleRecord,
    estimate_theta,
    heatbath_open_probability,
    heatbath_step,
    run_chain,
    transition_matrix,
)
from .trees import (
    SaddlePoint,
    TreePolynomial,
    acyclic_partition_identity,
    delta_r,
    discrete_saddle,
    f_r,
    f_r_prime,
    q_nkr,
    q_upper_bound,
    saddle_limits,
    solve_saddle,
    theta_of_s,
    tree_w,
)

__all__ = [name for name in dir() if not name.startswith("_")]
