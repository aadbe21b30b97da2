"""Operator connections on positive semidefinite matrices.

Build connections from representing functions or finite Borel measures
on [0, 1], evaluate ``A sigma B`` through the spectral calculus, solve
the operator equations ``A sigma X = B`` and ``X sigma A = B``,
classify cancellability and regularity, and verify the defining axioms
with a randomized harness.
"""

from .classify import (
    ClassificationReport,
    ProjectionFixedPointReport,
    RegularityEvidence,
    classify_connection,
    is_nontrivial_mean,
    projection_fixed_points,
    regularity_witness,
    zero_equation,
)
from .connection import (
    DEFAULT_SCHEDULE,
    AxiomReport,
    Connection,
    RegularizationSchedule,
    arithmetic_mean,
    dual_logarithmic_mean,
    evaluate,
    geometric_mean,
    harmonic_mean,
    left_trivial,
    logarithmic_mean,
    operator_sum,
    parallel_sum,
    quasi_arithmetic_mean,
    right_trivial,
    transpose_connection,
    verify_axioms,
)
from .errors import (
    DimMismatchError,
    DomainError,
    NoConvergenceError,
    NonFiniteError,
    NotAMeanError,
    NotInjectiveError,
    NotPdError,
    NotPsdError,
    OpConnectError,
    RangeError,
)
from .functions import (
    FunctionProps,
    FunctionSpec,
    RangeDescriptor,
    analyze_fn,
    arithmetic,
    constant,
    custom,
    dual_logarithmic,
    eval_fn,
    eval_inverse,
    geometric,
    harmonic,
    logarithmic,
    quasi_arithmetic,
    scalar_identity,
    transpose_fn,
)
from .matrixio import format_matrix, read_matrix, write_matrix
from .measures import (
    FiniteMeasure,
    arcsine,
    eval_from_measure,
    fn_from_measure,
    from_atoms,
    from_density,
    is_probability,
    known_measure_of,
    mass,
    point_mass,
    weighted_harmonic,
)
from .solver import (
    SolvabilityCondition,
    SolveReport,
    SolveStatus,
    always_solvable,
    quasi_arithmetic_solvability,
    solution_continuity_probe,
    solve_left,
    solve_right,
)
from .symcore import (
    DEFAULT_TOLERANCES,
    EigenDecomposition,
    PdMatrix,
    PsdMatrix,
    SymmetricMatrix,
    Tolerances,
    apply_fn,
    congruence,
    eigh,
    is_projection,
    loewner_leq,
    min_eigenvalue,
    sqrt_pair,
)

__version__ = "0.1.0"
