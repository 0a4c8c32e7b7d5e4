"""Random metric spaces over finite probability spaces.

Gluing, sigma-stable hulls, random Hausdorff distance, and constructive
fixed-point and variational solvers whose conclusions come back as
checkable certificates.
"""

from .errors import *  # noqa: F401,F403
from .prob import (
    TOL_ZERO,
    ContractionFactor,
    Event,
    ExtRandomScalar,
    Partition,
    ProbSpace,
    RandomInteger,
    RandomScalar,
    ess_inf,
    ess_sup,
    glue_scalars,
    indicator,
    is_sigma_stable_scalars,
    leq,
    lt_on,
    near_infimum_witness,
    near_supremum_witness,
)
from .space import (
    CallbackSpace,
    EuclideanRd,
    FinitePoints,
    L0Space,
    ProductSpace,
    RandomPoint,
    RMSpace,
    RNModuleSpace,
    SigmaStableSet,
    check_rm_axioms,
    check_rn_axioms,
    converges_eps_lambda,
    converges_L0,
    dist_to_set,
    distance_lattice_witness,
    glue_points,
    in_closure,
    is_d_sigma_stable,
    is_d_stable,
    l0_space,
    product_space,
    random_diameter,
    selection_set,
    sigma_hull,
)
from .fixpoint import (
    MultiMap,
    PointMap,
    SolveReport,
    approx_selection,
    banach_solve,
    hans_construct,
    hausdorff,
    iterate_power,
    nadler_solve,
    pointwise_operator_solve,
    random_power_solve,
)
from .variational import (
    EkelandCertificate,
    RandomFunction,
    caristi_fixed_point,
    ekeland_bruteforce,
    ekeland_point,
    is_proper,
    is_sigma_stable_fn,
    is_stable_fn,
    lsc_check,
    near_infimum,
    near_supremum,
)

__version__ = "0.1.0"
