"""Cancellability and regularity classification with numeric witnesses.

A connection is left cancellable exactly when its representing function
is nonconstant (equivalently, its measure is not concentrated at 0) and
right cancellable exactly when the function is not a scalar multiple of
the identity (measure not concentrated at 1).  It is regular when
``f(0) > 0``; nonregular connections annihilate singular directions:
``A sigma 0 = 0`` and singular second operands force ``0`` into the
spectrum of the result.  Nonregular means fix every orthogonal
projection, and for nontrivial means projections are the only fixed
points of ``A -> I sigma A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import functions as fns
from . import measures as msr
from .connection import (
    DEFAULT_SCHEDULE,
    Connection,
    RegularizationSchedule,
    evaluate,
    transpose_connection,
)
from .errors import NotAMeanError
from .sampling import random_pd, random_projection, random_psd, random_singular_psd
from .solver import SolveReport, solve_left
from .symcore import (
    DEFAULT_TOLERANCES,
    MAX_HARNESS_DIM,
    PsdMatrix,
    Tolerances,
    frobenius,
    is_projection,
)

__all__ = [
    "ClassificationReport",
    "classify_connection",
    "RegularityEvidence",
    "regularity_witness",
    "ProjectionFixedPointReport",
    "projection_fixed_points",
    "zero_equation",
    "is_nontrivial_mean",
]

#: Numeric strictness threshold for "f(0) > 0" style tests.
_POSITIVE_TOL = 1e-12
#: Spectrum membership "0 in Sp(.)": looser than order_tol because the
#: values pass through regularized limits.
_SPECTRUM_ZERO_TOL = 1e-6


def _grid() -> np.ndarray:
    return np.concatenate([[0.0], np.geomspace(1e-3, 1e3, 61)])


def _is_scalar_multiple_of_dirac(mu: msr.FiniteMeasure, location: float) -> bool:
    if mu.nodes is not None and mu.weights is not None and mu.weights.sum() > 0:
        return False
    for t, w in mu.atoms:
        if t != location and w != 0.0:
            return False
    return True


@dataclass
class ClassificationReport:
    """Cancellability flags, structural flags and their witnesses."""

    connection: str
    left_cancellable: bool
    right_cancellable: bool
    cancellable: bool
    is_mean: bool
    symmetric: bool
    regular: bool
    transpose_regular: bool
    witnesses: dict = field(default_factory=dict)
    measure_consistent: bool | None = None

    def to_text(self) -> str:
        lines = [f"connection = {self.connection}"]
        for name in (
            "left_cancellable",
            "right_cancellable",
            "cancellable",
            "is_mean",
            "symmetric",
            "regular",
            "transpose_regular",
        ):
            lines.append(f"{name} = {getattr(self, name)}")
        if self.measure_consistent is not None:
            lines.append(f"measure_consistent = {self.measure_consistent}")
        for key, value in self.witnesses.items():
            if isinstance(value, float):
                lines.append(f"witness {key} = {value:.12g}")
            else:
                lines.append(f"witness {key} = {value}")
        return "\n".join(lines) + "\n"


def classify_connection(
    conn: Connection, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> ClassificationReport:
    """Classify cancellability, symmetry, mean property and regularity.

    Function-side criteria are primary; when the associated measure is
    known the measure-side criteria (multiples of the point masses at 0
    and 1) are cross-checked and the agreement recorded.
    """
    props, _ = fns.analyze_fn(conn.fn)
    k = conn.scale
    effective_constant = k == 0.0 or props.is_constant
    effective_identity = k == 0.0 or props.is_scalar_identity
    left = not effective_constant
    right = not effective_identity
    f0 = k * props.f0
    f1 = conn.rep(1.0)
    g0 = k * props.transpose_f0
    xs = _grid()
    transpose = transpose_connection(conn)
    sym_gap = float(
        np.max(
            np.abs(conn.rep(xs) - transpose.rep(xs)) / (1.0 + np.abs(conn.rep(xs)))
        )
    )
    witnesses = {
        "f0": f0,
        "f1": f1,
        "transpose_f0": g0,
        "symmetry_gap": sym_gap,
        "injective": props.injective and k > 0.0,
        "bounded": props.bounded,
    }
    measure_consistent = None
    if conn.measure is not None:
        mu = conn.measure
        witnesses["measure_mass"] = k * msr.mass(mu)
        witnesses["measure_atom0"] = k * mu.atom_weight(0.0)
        witnesses["measure_atom1"] = k * mu.atom_weight(1.0)
        left_mu = not _is_scalar_multiple_of_dirac(mu, 0.0)
        right_mu = not _is_scalar_multiple_of_dirac(mu, 1.0)
        if k == 0.0:
            left_mu = right_mu = False
        measure_consistent = (
            left_mu == left
            and right_mu == right
            and abs(k * mu.atom_weight(0.0) - f0) <= 1e-8 * (1.0 + abs(f0))
            and abs(k * mu.atom_weight(1.0) - g0) <= 1e-8 * (1.0 + abs(g0))
        )
    return ClassificationReport(
        connection=conn.describe(),
        left_cancellable=left,
        right_cancellable=right,
        cancellable=left and right,
        is_mean=abs(f1 - 1.0) <= _POSITIVE_TOL,
        symmetric=sym_gap <= _POSITIVE_TOL,
        regular=f0 > _POSITIVE_TOL,
        transpose_regular=g0 > _POSITIVE_TOL,
        witnesses=witnesses,
        measure_consistent=measure_consistent,
    )


def is_nontrivial_mean(
    conn: Connection, tol: float = _POSITIVE_TOL
) -> bool:
    """A mean that is neither the constant-1 nor the identity function."""
    xs = _grid()
    vals = conn.rep(xs)
    if abs(conn.rep(1.0) - 1.0) > tol:
        return False
    if np.max(np.abs(vals - 1.0)) <= tol:
        return False
    if np.max(np.abs(vals - xs) / (1.0 + xs)) <= tol:
        return False
    return True


@dataclass
class WitnessCheck:
    """One named numeric witness with its agreement verdict."""

    name: str
    value: float
    agrees: bool
    description: str = ""


@dataclass
class RegularityEvidence:
    """Evidence bundle for the regularity dichotomy.

    ``regular`` is decided by ``f(0)``; every finite-checkable witness
    (measure atom at 0, the value of ``I sigma 0``, annihilation of the
    zero operand, singular spectra propagation) is evaluated and its
    agreement with the verdict recorded.
    """

    connection: str
    regular: bool
    f0: float
    dim: int
    seed: int
    checks: list[WitnessCheck] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return all(c.agrees for c in self.checks)

    def to_text(self) -> str:
        lines = [
            f"connection = {self.connection}",
            f"regular = {self.regular}",
            f"f0 = {self.f0:.12g}",
            f"dim = {self.dim}",
            f"seed = {self.seed}",
            f"consistent = {self.consistent}",
        ]
        for c in self.checks:
            lines.append(
                f"{c.name}: value={c.value:.6e} agrees={c.agrees}"
                + (f" ({c.description})" if c.description else "")
            )
        return "\n".join(lines) + "\n"


def regularity_witness(
    conn: Connection,
    dim: int,
    seed: int,
    trials: int = 5,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    schedule: RegularizationSchedule = DEFAULT_SCHEDULE,
) -> RegularityEvidence:
    """Check every finite-dimensional regularity witness against ``f(0)``.

    For a nonregular connection: ``I sigma 0 = 0``, ``A sigma 0 = 0``
    for random ``A``, and singular second operands give results with 0
    in the spectrum (witnessed by a minimum eigenvalue at most 1e-6).
    For a regular connection the same expressions stay bounded away
    from singularity.
    """
    if not 1 <= dim <= MAX_HARNESS_DIM:
        raise ValueError(f"dim must be in [1, {MAX_HARNESS_DIM}]")
    props, _ = fns.analyze_fn(conn.fn)
    f0 = conn.scale * props.f0
    regular = f0 > _POSITIVE_TOL
    checks: list[WitnessCheck] = []
    eye = PsdMatrix(np.eye(dim))
    zero = PsdMatrix(np.zeros((dim, dim)))

    checks.append(
        WitnessCheck(
            "f0_sign",
            f0,
            agrees=(f0 > _POSITIVE_TOL) == regular,
            description="f(0) > 0 iff regular",
        )
    )
    if conn.measure is not None:
        atom0 = conn.scale * conn.measure.atom_weight(0.0)
        checks.append(
            WitnessCheck(
                "measure_atom_at_zero",
                atom0,
                agrees=(atom0 > _POSITIVE_TOL) == regular
                and abs(atom0 - f0) <= 1e-8 * (1.0 + abs(f0)),
                description="mass at 0 equals f(0)",
            )
        )

    gap = frobenius(
        evaluate(conn, eye, zero, schedule, tolerances).entries - f0 * eye.entries
    )
    checks.append(
        WitnessCheck(
            "identity_with_zero",
            gap,
            agrees=gap <= 1e-9,
            description="I sigma 0 = f(0) I",
        )
    )

    children = np.random.SeedSequence(seed).spawn(3 * trials)
    worst_zero = 0.0
    worst_dev = 0.0
    for child in children[:trials]:
        rng = np.random.default_rng(child)
        a = random_pd(rng, dim)
        out = evaluate(conn, a, zero, schedule, tolerances)
        if regular:
            worst_dev = max(
                worst_dev,
                frobenius(out.entries - f0 * a.entries) / (1.0 + frobenius(a)),
            )
        else:
            worst_zero = max(worst_zero, frobenius(out))
    if regular:
        checks.append(
            WitnessCheck(
                "zero_operand",
                worst_dev,
                agrees=worst_dev <= 1e-9,
                description="A sigma 0 = f(0) A for random A",
            )
        )
    else:
        checks.append(
            WitnessCheck(
                "zero_operand",
                worst_zero,
                agrees=worst_zero <= 1e-7,
                description="A sigma 0 = 0 for random A",
            )
        )

    worst5 = -math.inf
    for child in children[trials : 2 * trials]:
        rng = np.random.default_rng(child)
        a = random_singular_psd(rng, dim) if dim > 1 else zero
        out = evaluate(conn, eye, a, schedule, tolerances)
        worst5 = max(worst5, out.min_eigenvalue)
    checks.append(
        WitnessCheck(
            "identity_with_singular",
            worst5,
            agrees=(worst5 <= _SPECTRUM_ZERO_TOL) != regular,
            description="0 in Sp(I sigma A) for singular A iff nonregular",
        )
    )

    worst6 = -math.inf
    for child in children[2 * trials :]:
        rng = np.random.default_rng(child)
        a = random_singular_psd(rng, dim) if dim > 1 else zero
        x = random_pd(rng, dim)
        out = evaluate(conn, x, a, schedule, tolerances)
        worst6 = max(worst6, out.min_eigenvalue)
    checks.append(
        WitnessCheck(
            "general_with_singular",
            worst6,
            agrees=(worst6 <= _SPECTRUM_ZERO_TOL) != regular,
            description="0 in Sp(X sigma A) for singular A iff nonregular",
        )
    )

    return RegularityEvidence(
        connection=conn.describe(),
        regular=regular,
        f0=f0,
        dim=dim,
        seed=seed,
        checks=checks,
    )


@dataclass
class ProjectionFixedPointReport:
    """Projection fixed-point evidence for a mean."""

    connection: str
    nonregular: bool
    nontrivial: bool
    dim: int
    seed: int
    projection_trials: int = 0
    projection_failures: int = 0
    worst_projection_gap: float = 0.0
    fixed_points_scanned: int = 0
    fixed_points_found: int = 0
    fixed_points_all_projections: bool = True
    sandwich_ok: bool = True
    sandwich_margin: float = math.inf

    @property
    def passed(self) -> bool:
        ok = self.fixed_points_all_projections and self.sandwich_ok
        if self.nonregular:
            ok = ok and self.projection_failures == 0
        return ok

    def to_text(self) -> str:
        lines = [
            f"connection = {self.connection}",
            f"nonregular = {self.nonregular}",
            f"nontrivial = {self.nontrivial}",
            f"dim = {self.dim}",
            f"seed = {self.seed}",
            f"projection_trials = {self.projection_trials}",
            f"projection_failures = {self.projection_failures}",
            f"worst_projection_gap = {self.worst_projection_gap:.6e}",
            f"fixed_points_scanned = {self.fixed_points_scanned}",
            f"fixed_points_found = {self.fixed_points_found}",
            f"fixed_points_all_projections = {self.fixed_points_all_projections}",
            f"sandwich_ok = {self.sandwich_ok}",
            f"sandwich_margin = {self.sandwich_margin:.6e}",
            f"passed = {self.passed}",
        ]
        return "\n".join(lines) + "\n"


def projection_fixed_points(
    conn: Connection,
    dim: int,
    seed: int,
    trials: int = 25,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    schedule: RegularizationSchedule = DEFAULT_SCHEDULE,
) -> ProjectionFixedPointReport:
    """Projection fixed-point behaviour of a mean.

    * For a nonregular mean every orthogonal projection satisfies
      ``I sigma P = P`` (within 1e-9); for a regular mean nontrivial
      projections are moved.
    * Scanning random PSD operands, any ``A`` with ``I sigma A = A``
      (within 1e-8) must be a projection when the mean is nontrivial.
    * Scalar sandwich: a nontrivial mean satisfies
      ``x < f(x) < 1`` on (0, 1) and ``1 < f(x) < x`` beyond 1.

    Raises
    ------
    NotAMeanError
        If ``f(1) != 1``.
    """
    if not 1 <= dim <= MAX_HARNESS_DIM:
        raise ValueError(f"dim must be in [1, {MAX_HARNESS_DIM}]")
    f1 = conn.rep(1.0)
    if abs(f1 - 1.0) > _POSITIVE_TOL:
        raise NotAMeanError(f"f(1) = {f1:.12g} != 1; not a mean")
    props, _ = fns.analyze_fn(conn.fn)
    nonregular = conn.scale * props.f0 <= _POSITIVE_TOL
    nontrivial = is_nontrivial_mean(conn)
    report = ProjectionFixedPointReport(
        connection=conn.describe(),
        nonregular=nonregular,
        nontrivial=nontrivial,
        dim=dim,
        seed=seed,
    )
    eye = PsdMatrix(np.eye(dim))
    children = np.random.SeedSequence(seed).spawn(2 * trials)

    for child in children[:trials]:
        rng = np.random.default_rng(child)
        p = random_projection(rng, dim)
        out = evaluate(conn, eye, p, schedule, tolerances)
        gap = frobenius(out.entries - p.entries)
        report.projection_trials += 1
        if nonregular:
            report.worst_projection_gap = max(report.worst_projection_gap, gap)
            if gap > 1e-9:
                report.projection_failures += 1
        else:
            # regular mean: I sigma P = P + f(0)(I - P) moves rank-deficient P
            rank = int(round(np.trace(p.entries)))
            expected = 0.0 if rank == dim else conn.scale * props.f0
            report.worst_projection_gap = max(
                report.worst_projection_gap, abs(gap / max(1, np.sqrt(dim - rank)) - expected)
            )

    # fixed-point scan: random operands plus constructed fixed points
    candidates = []
    for child in children[trials:]:
        rng = np.random.default_rng(child)
        candidates.append(random_psd(rng, dim, eig_range=(0.0, 3.0)))
    rng = np.random.default_rng(seed)
    candidates.append(random_projection(rng, dim))
    candidates.append(PsdMatrix(0.5 * np.eye(dim)))
    for a in candidates:
        out = evaluate(conn, eye, a, schedule, tolerances)
        report.fixed_points_scanned += 1
        if frobenius(out.entries - a.entries) <= 1e-8 * (1.0 + frobenius(a)):
            report.fixed_points_found += 1
            if nontrivial and not is_projection(a, tolerances.order_tol):
                report.fixed_points_all_projections = False

    if nontrivial:
        below = np.linspace(1e-3, 1.0 - 1e-3, 500)
        above = np.geomspace(1.0 + 1e-3, 1e2, 500)
        fb = conn.rep(below)
        fa = conn.rep(above)
        margins = np.concatenate(
            [fb - below, 1.0 - fb, fa - 1.0, above - fa]
        )
        report.sandwich_margin = float(margins.min())
        report.sandwich_ok = bool(report.sandwich_margin > 0.0)
    return report


def zero_equation(
    conn: Connection,
    a,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    schedule: RegularizationSchedule = DEFAULT_SCHEDULE,
) -> SolveReport:
    """Solve ``A sigma X = 0`` for ``A > 0``.

    Nonregular cancellable connections admit exactly ``X = 0``; regular
    connections report a range violation (0 sits below ``f(0)``).
    """
    a = PsdMatrix.wrap(a)
    zero = PsdMatrix(np.zeros((a.dim, a.dim)))
    return solve_left(conn, a, zero, tolerances, schedule)
