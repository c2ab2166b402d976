"""Non-stationary Gaussian random fields on linear networks.

Modules
-------
network      linear networks and points on them
resistance   resistance metric and auxiliary field covariance
kernels      non-stationary scalar and matrix-valued covariance functions
simulate     Cholesky and superposition samplers, log-Gaussian Cox processes
infer        weighted local likelihood estimation
cli          command line interface (``netcov``)
"""

from .errors import *  # noqa: F401,F403
from .network import (
    LinearNetwork,
    NetworkPoint,
    build_network,
    canonical,
    make_point,
    refine,
    sample_points,
    snap_to_network,
)
from .resistance import (
    ResistanceOracle,
    auxiliary_covariance,
    build_oracle,
    point_coefficients,
    resistance_between,
    resistance_matrix,
)
from .kernels import (
    BetaPrime,
    Constant,
    Dirac,
    ExpDecay,
    ExpDensity,
    KernelSpec,
    MultiKernelSpec,
    NumericMeasure,
    Tabulated,
    colocated_correlation,
    kernel_eval,
    kernel_matrix,
    multi_kernel_eval,
    multi_kernel_matrix,
    psi,
)
from .simulate import (
    ElementaryFieldConfig,
    FieldSample,
    PointPattern,
    chol_sample,
    edge_grid,
    elementary_field,
    lgcp_expected_count,
    lgcp_sample,
    sample_auxiliary,
    superposed_field,
)
from .infer import (
    CompactSupport,
    FitOptions,
    Gaussian,
    LocalFitProblem,
    count_likelihood_work,
    fit_local,
    fit_sites,
    local_loglik,
    order_neighbors,
    weighted_local_likelihood,
    weights,
)

__version__ = "0.1.0"
