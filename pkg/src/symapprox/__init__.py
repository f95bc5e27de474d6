"""Best approximation of finite frames by Parseval frames.

Public entry points are re-exported here; see the submodules for details.
"""

__version__ = "0.1.0"

from .approximator import (
    ApproximationResult,
    ComponentReport,
    ConnectionCertificate,
    approx_in_component,
    component_report,
    connect,
    distance_to_component,
    enumerate_family,
    gap_check,
    global_approx,
    global_diagonal,
    verify_critical_point,
)
from .diagonal import (
    DiagonalModel,
    MinimizerFamily,
    SignSequence,
    brute_force_all,
    brute_force_oracle,
    minimize_k,
    objective,
    seq_index,
)
from .errors import (
    ComponentMismatchError,
    DegenerateFrameError,
    DimensionError,
    DomainError,
    FrameError,
    InfeasibleComponentError,
    NumericalInstabilityError,
    NumericFailure,
    PreconditionError,
    ResourceLimitError,
)
from .frames import (
    Frame,
    ParsevalFrame,
    ProjectionPair,
    canonical_parseval,
    component_of,
    frame_bounds,
    index_pair,
    is_parseval,
    quadratic_distance,
    weakly_similar,
)
from .linalg import (
    hs_distance,
    hs_norm,
    matrix_exp,
    polar_decompose,
    simultaneous_svd,
    submajorization_holds,
    svd,
    unitary_log,
)
