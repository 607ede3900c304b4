"""Continuous-time quantum walks on odd graphs via spectral distributions."""
from ._kernels import BACKEND
from .errors import (
    ConfigurationError,
    ConsistencyError,
    InvariantViolation,
    NumericError,
    OddWalkError,
    PoleProximityError,
)
from .graph_core import (
    K_MAX,
    IntersectionNumbers,
    OddGraph,
    Stratification,
    all_pairs_distances,
    build_odd_graph,
    closed_form_intersection,
    distance,
    distance_via_intersection,
    intersection_numbers,
    stratify,
)
from .jacobi import (
    JacobiSequence,
    Mode,
    QuantumDecomposition,
    jacobi_from_intersection,
    jacobi_limit,
    jacobi_paper,
    quantum_decompose,
    verify_ladder_action,
)
from .qclt import (
    LimitMeasure,
    convergence_experiment,
    q0_limit,
    qm_limit_closed,
    qm_limit_quadrature,
    stieltjes_limit,
)
from .spectral import (
    PolynomialSequence,
    SpectralMeasure,
    gauss_measure,
    moments,
    poly_recurrence,
    rational_form,
    stieltjes_cf,
    stieltjes_rational,
)
from .walk import (
    AmplitudeSeries,
    WalkOracle,
    amplitude,
    amplitude_series,
    direct_oracle,
    vertex_probability,
)

__version__ = "0.1.0"
