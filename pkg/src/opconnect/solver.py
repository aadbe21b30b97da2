"""Solving the operator equations A sigma X = B and X sigma A = B.

For a connection that is not a scalar multiple of the left-trivial
mean, ``A sigma X = B`` with ``A > 0`` has a (unique) positive solution
exactly when the spectrum of ``A^{-1/2} B A^{-1/2}`` lies in the range
of the representing function, in which case

    X = A^{1/2} f^{-1}(A^{-1/2} B A^{-1/2}) A^{1/2}.

The right-sided equation reduces to the transpose connection.  The
module also carries the closed-form solvability analysis of the
quasi-arithmetic power family and a finite-difference probe for the
continuity of the solution map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import functions as fns
from .connection import (
    DEFAULT_SCHEDULE,
    Connection,
    RegularizationSchedule,
    evaluate,
    transpose_connection,
)
from .errors import NoConvergenceError, NotPdError
from .matrixio import format_matrix
from .symcore import (
    DEFAULT_TOLERANCES,
    PdMatrix,
    PsdMatrix,
    Tolerances,
    frobenius,
    min_eigenvalue,
    sqrt_pair,
)

__all__ = [
    "SolveStatus",
    "SolveReport",
    "solve_left",
    "solve_right",
    "always_solvable",
    "SolvabilityCondition",
    "quasi_arithmetic_solvability",
    "solution_continuity_probe",
]


class SolveStatus(str, Enum):
    UNIQUE_SOLUTION = "UniqueSolution"
    RANGE_VIOLATION = "RangeViolation"
    NOT_CANCELLABLE = "NotCancellable"


@dataclass
class SolveReport:
    """Outcome of an operator-equation solve.

    ``violating_eigenvalues`` holds ``(eigenvalue, gap)`` pairs for
    spectrum points that fall outside the admissible range; ``residual``
    is ``||A sigma X - B||_F`` for a computed solution.
    """

    status: SolveStatus
    X: PsdMatrix | None = None
    violating_eigenvalues: tuple[tuple[float, float], ...] = ()
    residual: float | None = None
    detail: str = ""

    @property
    def solved(self) -> bool:
        return self.status is SolveStatus.UNIQUE_SOLUTION

    def to_text(self) -> str:
        lines = [f"status = {self.status.value}"]
        if self.detail:
            lines.append(f"detail = {self.detail}")
        if self.residual is not None:
            lines.append(f"residual = {self.residual:.6e}")
        if self.violating_eigenvalues:
            lines.append("violating_eigenvalues:")
            for lam, gap in self.violating_eigenvalues:
                lines.append(f"  eigenvalue={lam:.12g} gap={gap:.6e}")
        if self.X is not None:
            lines.append("X:")
            lines.append(format_matrix(self.X.entries, indent="  "))
        return "\n".join(lines) + "\n"


def _effective_props(conn: Connection):
    """Props and range of the scaled representing function ``k f``."""
    props, rng = fns.analyze_fn(conn.fn)
    k = conn.scale
    if k == 0.0:
        zero_props, zero_rng = fns.analyze_fn(fns.constant(0.0))
        return zero_props, zero_rng
    scaled = fns.RangeDescriptor(
        lower=k * rng.lower,
        upper=k * rng.upper if not math.isinf(rng.upper) else math.inf,
        upper_attained=rng.upper_attained,
        numeric_estimate=rng.numeric_estimate,
    )
    return props, scaled


def solve_left(
    conn: Connection,
    a,
    b,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    schedule: RegularizationSchedule = DEFAULT_SCHEDULE,
) -> SolveReport:
    """Solve ``A sigma X = B`` for ``X >= 0`` given ``A > 0``.

    Returns a report: ``UniqueSolution`` with the solution and its
    residual, ``RangeViolation`` with the offending eigenvalues of
    ``A^{-1/2} B A^{-1/2}``, or ``NotCancellable`` when the connection
    is a scalar multiple of the left-trivial mean (constant ``f``).

    Raises
    ------
    NotPdError
        If ``A`` is singular; the equation hypotheses require ``A > 0``.
    """
    if not isinstance(a, PdMatrix):
        a = PdMatrix(np.asarray(a), tolerance=tolerances.psd_tol)
    b = PsdMatrix.wrap(b)
    props, rng = _effective_props(conn)
    if props.is_constant:
        return SolveReport(
            status=SolveStatus.NOT_CANCELLABLE,
            detail="representing function is constant "
            "(scalar multiple of the left-trivial mean)",
        )
    half, inv_half = sqrt_pair(a, tolerances)
    m = inv_half.entries @ b.entries @ inv_half.entries
    m_psd = PsdMatrix(m, tolerance=tolerances.psd_tol * (1.0 + frobenius(m)))
    w = m_psd.decomposition.eigenvalues.copy()
    w[w <= tolerances.psd_tol] = 0.0
    violations = []
    for lam in w:
        ok, gap = fns.in_range(float(lam), rng, tolerances.range_tol)
        if not ok:
            violations.append((float(lam), float(gap)))
    if violations:
        return SolveReport(
            status=SolveStatus.RANGE_VIOLATION,
            violating_eigenvalues=tuple(violations),
            detail=f"{len(violations)} eigenvalue(s) outside "
            f"[{rng.lower:.12g}, {rng.upper:.12g}"
            + ("]" if rng.upper_attained else ")"),
        )
    # the inversion gate must match the outer gate on the scaled range
    inv_vals = fns.eval_inverse(
        conn.fn, w / conn.scale, range_tol=tolerances.range_tol / conn.scale
    )
    q = m_psd.decomposition.eigenvectors
    x = half.entries @ ((q * inv_vals) @ q.T) @ half.entries
    x_psd = PsdMatrix(x, tolerance=tolerances.psd_tol * (1.0 + frobenius(x)))
    try:
        residual = frobenius(
            evaluate(conn, a, x_psd, schedule, tolerances).entries - b.entries
        )
    except NoConvergenceError:
        residual = math.inf
    return SolveReport(
        status=SolveStatus.UNIQUE_SOLUTION,
        X=x_psd,
        residual=residual,
    )


def solve_right(
    conn: Connection,
    a,
    b,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    schedule: RegularizationSchedule = DEFAULT_SCHEDULE,
) -> SolveReport:
    """Solve ``X sigma A = B`` for ``X >= 0`` given ``A > 0``.

    Equivalent to the left equation for the transpose connection, whose
    representing function is ``g(x) = x f(1/x)``; ``NotCancellable``
    when ``f`` is a scalar multiple of the identity (right-trivial
    multiples).
    """
    transposed = transpose_connection(conn)
    report = solve_left(transposed, a, b, tolerances, schedule)
    if report.status is SolveStatus.NOT_CANCELLABLE:
        report.detail = (
            "representing function is a scalar multiple of the identity "
            "(scalar multiple of the right-trivial mean)"
        )
    return report


def always_solvable(conn: Connection) -> bool:
    """True iff ``A sigma X = B`` is solvable for every ``A > 0, B >= 0``.

    Holds exactly when the (scaled) representing function is surjective
    onto the half-line: unbounded with value 0 at 0.
    """
    props, _ = _effective_props(conn)
    if props.is_constant:
        return False
    return props.f0 == 0.0 and not props.bounded


@dataclass
class SolvabilityCondition:
    """Closed-form solvability analysis for the power-mean equation.

    ``relation`` records the order condition on the operands
    (``always`` when the exponent is 0); ``threshold`` is the constant
    ``(1 - alpha)^{1/p}``; ``margin`` the signed minimum eigenvalue of
    the ordering gap; ``X`` the closed-form solution when solvable.
    """

    p: float
    alpha: float
    solvable: bool
    relation: str
    threshold: float | None = None
    margin: float | None = None
    X: PsdMatrix | None = None

    def to_text(self) -> str:
        lines = [
            f"p = {self.p:g}",
            f"alpha = {self.alpha:g}",
            f"solvable = {self.solvable}",
            f"relation = {self.relation}",
        ]
        if self.threshold is not None:
            lines.append(f"threshold = {self.threshold:.12g}")
        if self.margin is not None:
            lines.append(f"margin = {self.margin:.6e}")
        if self.X is not None:
            lines.append("X:")
            lines.append(format_matrix(self.X.entries, indent="  "))
        return "\n".join(lines) + "\n"


def _matrix_power(a: PsdMatrix, p: float) -> np.ndarray:
    w = a.decomposition.eigenvalues
    q = a.decomposition.eigenvectors
    with np.errstate(divide="ignore"):
        vals = np.where(w > 0, w ** float(p), 0.0 if p > 0 else np.inf)
    return (q * vals) @ q.T


def quasi_arithmetic_solvability(
    p: float,
    alpha: float,
    a,
    b,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    schedule: RegularizationSchedule = DEFAULT_SCHEDULE,
) -> SolvabilityCondition:
    """Solvability and closed-form solution for the power-mean equation.

    With mean ``[(1 - alpha) A^p + alpha X^p]^{1/p}`` equal to ``B``:

    * ``p = 0``: always solvable; ``X`` is the geometric-type compound
      with exponent ``1/alpha``.
    * ``0 < p <= 1``: solvable iff ``B >= (1 - alpha)^{1/p} A`` (up to
      ``order_tol``).
    * ``-1 <= p < 0``: solvable iff ``B < (1 - alpha)^{1/p} A`` with a
      strict minimum-eigenvalue margin above ``order_tol``.

    When solvable, ``X = [(1 - 1/alpha) A^p + (1/alpha) B^p]^{1/p}``
    (for ``p < 0`` and singular ``B`` this is computed as the limit over
    ``B + eps I`` along the schedule).  The closed form coincides with
    the spectral solution of ``solve_left`` whenever the operands
    commute, and for every operand pair at ``p`` in ``{-1, 0, 1}``.
    """
    if not -1.0 <= p <= 1.0:
        raise ValueError(f"exponent p must lie in [-1, 1], got {p}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not isinstance(a, PdMatrix):
        a = PdMatrix(np.asarray(a), tolerance=tolerances.psd_tol)
    b = PsdMatrix.wrap(b)
    if p == 0.0:
        half, inv_half = sqrt_pair(a, tolerances)
        m = PsdMatrix(inv_half.entries @ b.entries @ inv_half.entries,
                      tolerance=tolerances.psd_tol * (1.0 + frobenius(b)))
        x = half.entries @ _matrix_power(m, 1.0 / alpha) @ half.entries
        return SolvabilityCondition(
            p=p, alpha=alpha, solvable=True, relation="always",
            X=PsdMatrix(x, tolerance=tolerances.psd_tol * (1.0 + frobenius(x))),
        )
    threshold = (1.0 - alpha) ** (1.0 / p)
    diff = b.entries - threshold * a.entries
    if p > 0:
        margin = min_eigenvalue((diff + diff.T) / 2.0)
        solvable = margin >= -tolerances.order_tol
        relation = f"B >= {threshold:.12g} * A"
    else:
        margin = min_eigenvalue(-(diff + diff.T) / 2.0)
        solvable = margin > tolerances.order_tol
        relation = f"B < {threshold:.12g} * A (strict)"
    if not solvable:
        return SolvabilityCondition(
            p=p, alpha=alpha, solvable=False, relation=relation,
            threshold=threshold, margin=float(margin),
        )
    x = _power_compound(a, b, p, 1.0 / alpha, tolerances, schedule)
    return SolvabilityCondition(
        p=p, alpha=alpha, solvable=True, relation=relation,
        threshold=threshold, margin=float(margin), X=x,
    )


def _power_compound(
    a: PdMatrix,
    b: PsdMatrix,
    p: float,
    beta: float,
    tolerances: Tolerances,
    schedule: RegularizationSchedule,
) -> PsdMatrix:
    """``[(1 - beta) A^p + beta B^p]^{1/p}``, via a limit for singular B, p < 0."""

    def compound(b_entries: np.ndarray) -> np.ndarray:
        bp = _matrix_power(
            PsdMatrix(b_entries, tolerance=tolerances.psd_tol * (1.0 + frobenius(b_entries))),
            p,
        )
        inner = (1.0 - beta) * _matrix_power(a, p) + beta * bp
        inner_psd = PsdMatrix(
            inner, tolerance=tolerances.psd_tol * (1.0 + frobenius(inner))
        )
        return _matrix_power(inner_psd, 1.0 / p)

    if p > 0 or b.min_eigenvalue > tolerances.psd_tol:
        x = compound(b.entries)
        return PsdMatrix(x, tolerance=tolerances.psd_tol * (1.0 + frobenius(x)))
    eye = np.eye(b.dim)
    prev = None
    gap = None
    for eps in schedule.epsilons:
        cur = compound(b.entries + eps * eye)
        if prev is not None:
            gap = frobenius(cur - prev)
            if gap <= schedule.convergence_tol:
                return PsdMatrix(
                    cur, tolerance=tolerances.psd_tol * (1.0 + frobenius(cur))
                )
        prev = cur
    raise NoConvergenceError(
        f"power-compound regularization did not converge (last gap {gap:.3e})",
        last_gap=gap,
    )


def solution_continuity_probe(
    conn: Connection,
    a,
    b,
    delta: float,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Finite-difference sensitivity of the solution map ``B -> X``.

    Perturbs ``B`` along every unit-Frobenius symmetric coordinate
    direction and returns the largest ratio
    ``||X(A, B + delta E) - X(A, B)||_F / delta``.  Requires an
    always-solvable connection so that every perturbed equation remains
    solvable.  ``delta = 0`` returns 0 by convention.
    """
    if not always_solvable(conn):
        raise ValueError("continuity probe requires an always-solvable connection")
    if delta == 0.0:
        return 0.0
    if not isinstance(a, PdMatrix):
        a = PdMatrix(np.asarray(a), tolerance=tolerances.psd_tol)
    b = PsdMatrix.wrap(b)
    base = solve_left(conn, a, b, tolerances)
    if not base.solved:
        raise ValueError(f"base equation unexpectedly not solvable: {base.status}")
    dim = b.dim
    worst = 0.0
    for i in range(dim):
        for j in range(i, dim):
            e = np.zeros((dim, dim))
            if i == j:
                e[i, i] = 1.0
            else:
                e[i, j] = e[j, i] = 1.0 / math.sqrt(2.0)
            perturbed = PsdMatrix(
                b.entries + delta * e,
                tolerance=tolerances.psd_tol * (1.0 + frobenius(b)) + delta,
            )
            rep = solve_left(conn, a, perturbed, tolerances)
            if not rep.solved:
                raise ValueError(
                    f"perturbed equation not solvable along ({i},{j})"
                )
            ratio = frobenius(rep.X.entries - base.X.entries) / delta
            worst = max(worst, ratio)
    return worst
