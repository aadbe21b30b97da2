"""Connections on positive semidefinite matrices.

A connection is a binary operation on PSD matrices that is monotone in
both arguments, satisfies the transformer inequality and is continuous
from above.  Each one is determined by a representing function f (or
equivalently by a finite Borel measure on [0, 1]) and evaluated through
congruence and the spectral calculus:

    A sigma B = k * A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2},   A > 0,

extended to singular A as a decreasing limit over A + eps I.  The
module also provides the transpose (A, B) -> B sigma A and a randomized
harness checking the defining axioms on sampled operands.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from . import functions as fns
from . import measures as msr
from .errors import DimMismatchError, NoConvergenceError
from .sampling import (
    random_pd,
    random_psd,
    random_symmetric_invertible,
)
from .symcore import (
    DEFAULT_TOLERANCES,
    MAX_HARNESS_DIM,
    PdMatrix,
    PsdMatrix,
    Tolerances,
    _psd_from_decomposition,
    apply_fn,
    frobenius,
    min_eigenvalue,
    sqrt_pair,
)

__all__ = [
    "RegularizationSchedule",
    "DEFAULT_SCHEDULE",
    "Connection",
    "evaluate",
    "transpose_connection",
    "verify_axioms",
    "AxiomCheck",
    "AxiomReport",
    "arithmetic_mean",
    "geometric_mean",
    "harmonic_mean",
    "quasi_arithmetic_mean",
    "logarithmic_mean",
    "dual_logarithmic_mean",
    "left_trivial",
    "right_trivial",
    "parallel_sum",
    "operator_sum",
]


def _default_epsilons() -> tuple[float, ...]:
    return tuple(1e-2 * 2.0 ** (-j) for j in range(41))


@dataclass(frozen=True)
class RegularizationSchedule:
    """Decreasing sequence of shifts used on singular operands.

    ``evaluate`` walks ``A + eps I`` down the schedule and stops when
    successive iterates differ by at most ``convergence_tol`` in
    Frobenius norm; exhausting the schedule raises ``NoConvergenceError``
    rather than extrapolating.
    """

    epsilons: tuple[float, ...] = field(default_factory=_default_epsilons)
    convergence_tol: float = 1e-7

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilons)
        if not eps or any(e <= 0 for e in eps):
            raise ValueError("epsilons must be positive")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("epsilons must be strictly decreasing")
        object.__setattr__(self, "epsilons", eps)
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be positive")


DEFAULT_SCHEDULE = RegularizationSchedule()


@dataclass(frozen=True, eq=False)
class Connection:
    """A scale ``k >= 0`` times a function- or measure-defined connection.

    At least one source is present.  When a connection is built from a
    catalog function whose associated measure has a closed form, the
    measure is attached automatically and both sources are cross-checked
    on a grid at construction.
    """

    fn: fns.FunctionSpec
    measure: msr.FiniteMeasure | None = None
    scale: float = 1.0

    def __post_init__(self):
        if self.scale < 0:
            raise ValueError("scale must be nonnegative")

    @classmethod
    def from_function(
        cls,
        f: fns.FunctionSpec,
        scale: float = 1.0,
        attach_measure: bool = True,
    ) -> "Connection":
        mu = msr.known_measure_of(f) if attach_measure else None
        conn = cls(fn=f, measure=mu, scale=float(scale))
        if mu is not None:
            _check_sources_agree(conn)
        return conn

    @classmethod
    def from_measure(cls, mu: msr.FiniteMeasure, scale: float = 1.0) -> "Connection":
        f = fns.FunctionSpec(
            fns.CUSTOM,
            evaluator=lambda x: msr.fn_from_measure(mu, x),
            label=f"measure[{mu.describe()}]",
        )
        return cls(fn=f, measure=mu, scale=float(scale))

    def rep(self, x):
        """The representing function ``k * f`` at scalar or array ``x``."""
        return self.scale * fns.eval_fn(self.fn, x)

    def describe(self) -> str:
        base = self.fn.describe()
        if self.scale != 1.0:
            return f"{self.scale:g} * ({base})"
        return base

    def evaluate(self, a, b, **kwargs) -> PsdMatrix:
        return evaluate(self, a, b, **kwargs)

    def transpose(self) -> "Connection":
        return transpose_connection(self)


def _check_sources_agree(conn: Connection, tol: float = 1e-6):
    xs = np.concatenate([[0.0], np.geomspace(1e-2, 1e2, 25)])
    via_fn = fns.eval_fn(conn.fn, xs)
    via_mu = msr.fn_from_measure(conn.measure, xs)
    gap = np.abs(via_fn - via_mu) / (1.0 + np.abs(xs))
    if gap.max() > tol:
        raise ValueError(
            "function and measure sources disagree: "
            f"max gap {gap.max():.3e} exceeds {tol:.1e}"
        )


# --------------------------------------------------------------------------
# catalog
# --------------------------------------------------------------------------


def arithmetic_mean(alpha: float = 0.5) -> Connection:
    """(A, B) -> (1 - alpha) A + alpha B."""
    return Connection.from_function(fns.arithmetic(alpha))


def geometric_mean(alpha: float = 0.5) -> Connection:
    """(A, B) -> A^{1/2} (A^{-1/2} B A^{-1/2})^alpha A^{1/2}."""
    return Connection.from_function(fns.geometric(alpha))


def harmonic_mean(alpha: float = 0.5) -> Connection:
    """(A, B) -> ((1 - alpha) A^{-1} + alpha B^{-1})^{-1}."""
    return Connection.from_function(fns.harmonic(alpha))


def quasi_arithmetic_mean(p: float, alpha: float) -> Connection:
    """The power-mean family member with exponent p and weight alpha."""
    return Connection.from_function(fns.quasi_arithmetic(p, alpha))


def logarithmic_mean() -> Connection:
    """Representing function (x - 1) / log x."""
    return Connection.from_function(fns.logarithmic())


def dual_logarithmic_mean() -> Connection:
    """Dual of the logarithmic mean; representing function x log x / (x - 1)."""
    return Connection.from_function(fns.dual_logarithmic())


def left_trivial(k: float = 1.0) -> Connection:
    """(A, B) -> k A."""
    return Connection.from_function(fns.constant(k))


def right_trivial(k: float = 1.0) -> Connection:
    """(A, B) -> k B."""
    return Connection.from_function(fns.scalar_identity(k))


def parallel_sum() -> Connection:
    """(A, B) -> (A^{-1} + B^{-1})^{-1}, i.e. half the harmonic mean."""
    return Connection.from_function(fns.harmonic(0.5), scale=0.5)


def operator_sum() -> Connection:
    """(A, B) -> A + B, twice the arithmetic mean."""
    return Connection.from_function(fns.arithmetic(0.5), scale=2.0)


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------


def _evaluate_pd(
    conn: Connection,
    a: PdMatrix,
    b: PsdMatrix,
    tolerances: Tolerances,
) -> PsdMatrix:
    half, inv_half = sqrt_pair(a, tolerances)
    m = inv_half.entries @ b.entries @ inv_half.entries
    m_psd = PsdMatrix(m, tolerance=tolerances.psd_tol * (1.0 + frobenius(m)))
    # eigenvalues indistinguishable from 0 follow the f(0) convention;
    # the threshold is absolute so that honest small eigenvalues survive
    # even when the congruence inflates the norm of m
    fm = apply_fn(m_psd, lambda w: conn.rep(w), zero_tol=tolerances.psd_tol)
    out = half.entries @ fm.entries @ half.entries
    return PsdMatrix(out, tolerance=tolerances.psd_tol * (1.0 + frobenius(out)))


def evaluate(
    conn: Connection,
    a,
    b,
    schedule: RegularizationSchedule = DEFAULT_SCHEDULE,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> PsdMatrix:
    """Evaluate ``A sigma B``.

    For strictly positive ``A`` the congruence form
    ``k A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}`` is exact up to
    eigensolver precision.  Singular ``A`` is replaced by ``A + eps I``
    along the schedule (``B`` needs no shift in this form); the limit is
    declared reached when successive iterates differ by at most the
    schedule's convergence tolerance in Frobenius norm.

    Raises
    ------
    NoConvergenceError
        If the schedule is exhausted; the last gap is reported instead
        of silently extrapolating.
    """
    a = PsdMatrix.wrap(a)
    b = PsdMatrix.wrap(b)
    if a.dim != b.dim:
        raise DimMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.min_eigenvalue > tolerances.psd_tol:
        if isinstance(a, PdMatrix):
            pd = a
        else:
            dec = a.decomposition
            pd = _psd_from_decomposition(
                PdMatrix, dec.eigenvalues, dec.eigenvectors, tolerances.psd_tol
            )
        return _evaluate_pd(conn, pd, b, tolerances)
    eye = np.eye(a.dim)
    prev = None
    gap = None
    for eps in schedule.epsilons:
        shifted = PdMatrix(a.entries + eps * eye, tolerance=0.0)
        cur = _evaluate_pd(conn, shifted, b, tolerances).entries
        if prev is not None:
            gap = frobenius(cur - prev)
            if gap <= schedule.convergence_tol:
                return PsdMatrix(
                    cur, tolerance=tolerances.psd_tol * (1.0 + frobenius(cur))
                )
        prev = cur
    raise NoConvergenceError(
        "regularization schedule exhausted without convergence "
        f"(last gap {gap:.3e} > {schedule.convergence_tol:.1e})",
        last_gap=gap,
    )


def transpose_connection(conn: Connection) -> Connection:
    """The connection ``(A, B) -> B sigma A``.

    Its representing function is ``x -> x f(1/x)`` and its measure is
    the pushforward of ``mu`` under ``t -> 1 - t``.
    """
    if conn.fn.kind != fns.CUSTOM:
        return replace(
            Connection.from_function(fns.transpose_fn(conn.fn)),
            scale=conn.scale,
        )
    if conn.measure is not None:
        return Connection.from_measure(
            msr.transpose_measure(conn.measure), scale=conn.scale
        )
    return Connection(
        fn=fns.transpose_fn(conn.fn), measure=None, scale=conn.scale
    )


# --------------------------------------------------------------------------
# axiom harness
# --------------------------------------------------------------------------


@dataclass
class AxiomCheck:
    """Outcome of one axiom over a batch of randomized trials."""

    name: str
    trials: int = 0
    failures: int = 0
    worst_violation: float = 0.0

    def record(self, violation: float, tol: float):
        self.trials += 1
        self.worst_violation = max(self.worst_violation, violation)
        if violation > tol:
            self.failures += 1

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass
class AxiomReport:
    """Per-axiom pass counts and worst violations for one connection."""

    connection: str
    dim: int
    trials: int
    seed: int
    checks: dict[str, AxiomCheck]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def to_text(self) -> str:
        lines = [
            f"connection = {self.connection}",
            f"dim = {self.dim}",
            f"trials = {self.trials}",
            f"seed = {self.seed}",
            f"all_passed = {self.all_passed}",
        ]
        for name, c in self.checks.items():
            lines.append(
                f"{name}: trials={c.trials} failures={c.failures} "
                f"worst_violation={c.worst_violation:.6e}"
            )
        return "\n".join(lines) + "\n"


def _loewner_violation(lhs: PsdMatrix, rhs) -> float:
    """How far ``lhs <= rhs`` fails, as a nonnegative eigenvalue deficit."""
    diff = np.asarray(rhs) - np.asarray(lhs)
    return max(0.0, -min_eigenvalue((diff + diff.T) / 2.0))


def verify_axioms(
    conn: Connection,
    trials: int,
    dim: int,
    seed: int,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    schedule: RegularizationSchedule = DEFAULT_SCHEDULE,
    m3_trials: int | None = None,
    m3_steps: int = 12,
) -> AxiomReport:
    """Randomized check of the connection axioms plus fixed-point identity.

    Per trial (with independent per-trial seeds spawned from ``seed``):

    * monotonicity: ``A <= C`` and ``B <= D`` built by adding PSD
      increments; requires ``A sigma B <= C sigma D`` up to
      ``tolerances.order_tol`` in the eigenvalue sense.
    * transformer inequality: for random invertible symmetric ``C``,
      ``C (A sigma B) C <= (C A C) sigma (C B C)``; for positive
      definite ``C`` the same expression must be an equality within
      ``1e-8`` relative to the operand scale (congruence invariance).
    * continuity from above: along ``A + 2^{-n} I`` (and the same shift
      on ``B``) the evaluations must decrease in the Loewner order up to
      ``1e-9`` and approach the evaluation at the limit point.  This
      runs on ``m3_trials`` trials (default: at most 25).
    * fixed point: ``A sigma A = k f(1) A``.

    Failures are recorded in the report, not raised.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 1 <= dim <= MAX_HARNESS_DIM:
        raise ValueError(f"dim must be in [1, {MAX_HARNESS_DIM}]")
    if m3_trials is None:
        m3_trials = min(trials, 25)
    checks = {
        "m1_monotonicity": AxiomCheck("m1_monotonicity"),
        "m2_transformer_inequality": AxiomCheck("m2_transformer_inequality"),
        "m2_congruence_equality": AxiomCheck("m2_congruence_equality"),
        "m3_monotone_decrease": AxiomCheck("m3_monotone_decrease"),
        "m3_limit_agreement": AxiomCheck("m3_limit_agreement"),
        "fixed_point": AxiomCheck("fixed_point"),
    }
    f1 = conn.rep(1.0)
    children = np.random.SeedSequence(seed).spawn(trials)
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        a = random_pd(rng, dim)
        b = random_pd(rng, dim)
        base = evaluate(conn, a, b, schedule, tolerances)

        # M1: A <= C, B <= D  =>  A sigma B <= C sigma D
        inc_a = random_psd(rng, dim, eig_range=(0.0, 1.0))
        inc_b = random_psd(rng, dim, eig_range=(0.0, 1.0))
        c = PdMatrix(a.entries + inc_a.entries)
        d = PdMatrix(b.entries + inc_b.entries)
        upper = evaluate(conn, c, d, schedule, tolerances)
        checks["m1_monotonicity"].record(
            _loewner_violation(base, upper), tolerances.order_tol
        )

        # M2 inequality with indefinite symmetric C
        sym_c = random_symmetric_invertible(rng, dim)
        lhs = sym_c.entries @ base.entries @ sym_c.entries
        rhs = evaluate(
            conn,
            PsdMatrix(sym_c.entries @ a.entries @ sym_c.entries),
            PsdMatrix(sym_c.entries @ b.entries @ sym_c.entries),
            schedule,
            tolerances,
        )
        checks["m2_transformer_inequality"].record(
            _loewner_violation(PsdMatrix.wrap(lhs), rhs), tolerances.order_tol
        )

        # M2 equality with positive definite C (congruence invariance)
        pd_c = random_pd(rng, dim, eig_range=(0.5, 2.0))
        lhs2 = pd_c.entries @ base.entries @ pd_c.entries
        rhs2 = evaluate(
            conn,
            PsdMatrix(pd_c.entries @ a.entries @ pd_c.entries),
            PsdMatrix(pd_c.entries @ b.entries @ pd_c.entries),
            schedule,
            tolerances,
        )
        rel = frobenius(rhs2.entries - lhs2) / (1.0 + frobenius(lhs2))
        checks["m2_congruence_equality"].record(max(0.0, rel - 1e-8), 0.0)

        # M3 surrogate on a capped subset of trials
        if i < m3_trials:
            prev = None
            worst = 0.0
            cur = None
            for n in range(m3_steps + 1):
                shift = 2.0 ** (-n)
                cur = evaluate(
                    conn,
                    PdMatrix(a.entries + shift * np.eye(dim)),
                    PsdMatrix(b.entries + shift * np.eye(dim)),
                    schedule,
                    tolerances,
                )
                if prev is not None:
                    worst = max(worst, _loewner_violation(cur, prev))
                prev = cur
            checks["m3_monotone_decrease"].record(worst, 1e-9)
            limit_gap = frobenius(cur.entries - base.entries) / (
                1.0 + frobenius(base.entries)
            )
            checks["m3_limit_agreement"].record(max(0.0, limit_gap - 1e-3), 0.0)

        # fixed point A sigma A = f(1) A
        fixed = evaluate(conn, a, a, schedule, tolerances)
        gap = frobenius(fixed.entries - f1 * a.entries) / (1.0 + frobenius(a))
        checks["fixed_point"].record(max(0.0, gap - 1e-9), 0.0)

    return AxiomReport(
        connection=conn.describe(),
        dim=dim,
        trials=trials,
        seed=seed,
        checks=checks,
    )
