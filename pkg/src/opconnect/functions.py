"""Representing functions on the nonnegative half-line.

A catalog of the operator monotone functions that generate the classic
connections (weighted arithmetic / geometric / harmonic, the
quasi-arithmetic power family, the logarithmic pair, scalar constants
and multiples of the identity), plus user-supplied custom functions.

The module evaluates these functions, inverts them (closed form where
available, monotone bisection otherwise), forms transposes
``g(x) = x f(1/x)`` and reports analytic structure: injectivity,
boundedness, value at zero, and the exact range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import DomainError, NotInjectiveError, RangeError

__all__ = [
    "FunctionSpec",
    "FunctionProps",
    "RangeDescriptor",
    "constant",
    "scalar_identity",
    "arithmetic",
    "geometric",
    "harmonic",
    "quasi_arithmetic",
    "logarithmic",
    "dual_logarithmic",
    "custom",
    "eval_fn",
    "eval_inverse",
    "transpose_fn",
    "analyze_fn",
    "in_range",
    "CATALOG_KINDS",
]

CONSTANT = "constant"
SCALAR_IDENTITY = "scalar_identity"
ARITHMETIC = "weighted_arithmetic"
GEOMETRIC = "weighted_geometric"
HARMONIC = "weighted_harmonic"
QUASI = "quasi_arithmetic"
LOGARITHMIC = "logarithmic"
DUAL_LOGARITHMIC = "dual_logarithmic"
CUSTOM = "custom"

CATALOG_KINDS = (
    CONSTANT,
    SCALAR_IDENTITY,
    ARITHMETIC,
    GEOMETRIC,
    HARMONIC,
    QUASI,
    LOGARITHMIC,
    DUAL_LOGARITHMIC,
)

#: |f(x) - y| <= BISECT_TOL * (1 + |y|) terminates the bisection.
BISECT_TOL = 1e-12
#: Bracket expansion gives up past this abscissa.
BISECT_MAX_HI = 1e15


@dataclass(frozen=True)
class FunctionSpec:
    """A representing function f: [0, inf) -> [0, inf).

    Catalog members are identified by ``kind`` with named parameters;
    ``custom`` carries a scalar evaluator together with a declared
    operator-monotonicity certificate.  Only scalar monotonicity and
    midpoint concavity are checked on grids for custom functions; full
    operator monotonicity remains the caller's obligation.
    """

    kind: str
    k: float | None = None
    alpha: float | None = None
    p: float | None = None
    evaluator: Callable[[float], float] | None = field(
        default=None, compare=False
    )
    label: str = ""
    operator_monotone_certified: bool = True

    def describe(self) -> str:
        if self.kind == CONSTANT:
            return f"constant k={self.k:g}"
        if self.kind == SCALAR_IDENTITY:
            return f"scalar_identity k={self.k:g}"
        if self.kind in (ARITHMETIC, GEOMETRIC, HARMONIC):
            return f"{self.kind} alpha={self.alpha:g}"
        if self.kind == QUASI:
            return f"{self.kind} p={self.p:g} alpha={self.alpha:g}"
        if self.kind == CUSTOM:
            return f"custom {self.label}" if self.label else "custom"
        return self.kind


def _check_alpha(alpha: float):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def constant(k: float) -> FunctionSpec:
    """f(x) = k, the representing function of k times the left-trivial mean."""
    if k < 0:
        raise ValueError("constant level must be nonnegative")
    return FunctionSpec(CONSTANT, k=float(k))


def scalar_identity(k: float) -> FunctionSpec:
    """f(x) = k x, the representing function of k times the right-trivial mean."""
    if k < 0:
        raise ValueError("slope must be nonnegative")
    if k == 0:
        return constant(0.0)
    return FunctionSpec(SCALAR_IDENTITY, k=float(k))


def arithmetic(alpha: float = 0.5) -> FunctionSpec:
    """f(x) = (1 - alpha) + alpha x."""
    _check_alpha(alpha)
    return FunctionSpec(ARITHMETIC, alpha=float(alpha))


def geometric(alpha: float = 0.5) -> FunctionSpec:
    """f(x) = x ** alpha."""
    _check_alpha(alpha)
    return FunctionSpec(GEOMETRIC, alpha=float(alpha))


def harmonic(alpha: float = 0.5) -> FunctionSpec:
    """f(x) = x / ((1 - alpha) x + alpha), i.e. 1 !_alpha x."""
    _check_alpha(alpha)
    return FunctionSpec(HARMONIC, alpha=float(alpha))


def quasi_arithmetic(p: float, alpha: float) -> FunctionSpec:
    """f(x) = ((1 - alpha) + alpha x**p) ** (1/p), p in [-1, 1].

    The constructor normalizes the degenerate exponents: p = 0 is the
    geometric member (the continuity limit), p = 1 the arithmetic and
    p = -1 the harmonic member.
    """
    _check_alpha(alpha)
    if not -1.0 <= p <= 1.0:
        raise ValueError(f"exponent p must lie in [-1, 1], got {p}")
    if p == 0.0:
        return geometric(alpha)
    if p == 1.0:
        return arithmetic(alpha)
    if p == -1.0:
        return harmonic(alpha)
    return FunctionSpec(QUASI, p=float(p), alpha=float(alpha))


def logarithmic() -> FunctionSpec:
    """f(x) = (x - 1) / log x, with f(0) = 0 and f(1) = 1 by continuity."""
    return FunctionSpec(LOGARITHMIC)


def dual_logarithmic() -> FunctionSpec:
    """f(x) = x log x / (x - 1), with f(0) = 0 and f(1) = 1 by continuity."""
    return FunctionSpec(DUAL_LOGARITHMIC)


def custom(
    evaluator: Callable[[float], float],
    label: str = "",
    operator_monotone: bool = True,
    check_grid: bool = True,
) -> FunctionSpec:
    """Wrap a user-supplied scalar function.

    ``operator_monotone`` records the caller's certificate; it is not
    verified.  With ``check_grid`` the wrapper samples the function on a
    coarse grid and rejects evaluators that are decreasing or violate
    midpoint concavity beyond roundoff.
    """
    spec = FunctionSpec(
        CUSTOM,
        evaluator=evaluator,
        label=label,
        operator_monotone_certified=bool(operator_monotone),
    )
    if check_grid:
        xs = np.concatenate([[0.0], np.geomspace(1e-4, 1e4, 60)])
        ys = eval_fn(spec, xs)
        if np.any(np.diff(ys) < -1e-12 * (1.0 + np.abs(ys[:-1]))):
            raise ValueError("custom evaluator is decreasing on the check grid")
        mid = eval_fn(spec, (xs[:-1] + xs[1:]) / 2.0)
        if np.any(mid < (ys[:-1] + ys[1:]) / 2.0 - 1e-9 * (1.0 + mid)):
            raise ValueError(
                "custom evaluator violates midpoint concavity on the check grid"
            )
    return spec


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _eval_array(f: FunctionSpec, x: np.ndarray) -> np.ndarray:
    if np.any(x < 0):
        raise DomainError("representing functions are defined on x >= 0")
    kind = f.kind
    if kind == CONSTANT:
        return np.full_like(x, f.k)
    if kind == SCALAR_IDENTITY:
        return f.k * x
    if kind == ARITHMETIC:
        return (1.0 - f.alpha) + f.alpha * x
    if kind == GEOMETRIC:
        return x**f.alpha
    if kind == HARMONIC:
        # x / ((1-a) x + a); exact 0 at x = 0
        return x / ((1.0 - f.alpha) * x + f.alpha)
    if kind == QUASI:
        p, a = f.p, f.alpha
        out = np.empty_like(x)
        pos = x > 0
        with np.errstate(over="ignore"):
            base = (1.0 - a) + a * x[pos] ** p
            out[pos] = base ** (1.0 / p)
        if p > 0:
            out[~pos] = (1.0 - a) ** (1.0 / p)
        else:
            out[~pos] = 0.0  # continuity limit as x -> 0+
        return out
    if kind == LOGARITHMIC:
        h = x - 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            out = h / np.log1p(h)
        out = np.where(x == 1.0, 1.0, out)
        return np.where(x == 0.0, 0.0, out)
    if kind == DUAL_LOGARITHMIC:
        h = x - 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (1.0 + h) * np.log1p(h) / h
        out = np.where(x == 1.0, 1.0, out)
        return np.where(x == 0.0, 0.0, out)
    if kind == CUSTOM:
        try:
            vals = np.array([float(f.evaluator(float(v))) for v in x])
        except DomainError:
            raise
        except Exception as exc:  # noqa: BLE001
            raise DomainError(f"custom evaluator raised: {exc}") from exc
        if not np.isfinite(vals).all():
            raise DomainError("custom evaluator returned a non-finite value")
        return vals
    raise ValueError(f"unknown function kind {kind!r}")


def eval_fn(f: FunctionSpec, x):
    """Evaluate ``f`` at a scalar or array of nonnegative points."""
    arr = np.asarray(x, dtype=float)
    out = _eval_array(f, np.atleast_1d(arr))
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


# ---------------------------------------------------------------------------
# analysis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RangeDescriptor:
    """The range of a representing function.

    ``lower`` equals ``f(0)`` and is always attained.  ``upper`` is the
    supremum (``inf`` when unbounded); ``upper_attained`` tells whether
    the supremum belongs to the range.  ``numeric_estimate`` flags
    values obtained by sampling (custom functions only).
    """

    lower: float
    upper: float
    upper_attained: bool
    numeric_estimate: bool = False


@dataclass(frozen=True)
class FunctionProps:
    """Analytic facts about a representing function.

    ``transpose_f0`` is the value at zero of the transpose
    ``g(x) = x f(1/x)``, i.e. the slope of ``f`` at infinity.
    """

    is_constant: bool
    is_scalar_identity: bool
    injective: bool
    bounded: bool
    f0: float
    transpose_f0: float

    def __post_init__(self):
        # a nonconstant operator monotone function is injective
        if self.injective == self.is_constant:
            raise ValueError("injectivity must equal non-constancy")


def analyze_fn(f: FunctionSpec) -> tuple[FunctionProps, RangeDescriptor]:
    """Analytic classification of ``f``: injectivity, bounds and range."""
    kind = f.kind
    if kind == CONSTANT:
        props = FunctionProps(True, False, False, True, f.k, 0.0)
        return props, RangeDescriptor(f.k, f.k, True)
    if kind == SCALAR_IDENTITY:
        props = FunctionProps(False, True, True, False, 0.0, f.k)
        return props, RangeDescriptor(0.0, math.inf, False)
    if kind == ARITHMETIC:
        props = FunctionProps(False, False, True, False, 1.0 - f.alpha, f.alpha)
        return props, RangeDescriptor(1.0 - f.alpha, math.inf, False)
    if kind == GEOMETRIC:
        props = FunctionProps(False, False, True, False, 0.0, 0.0)
        return props, RangeDescriptor(0.0, math.inf, False)
    if kind == HARMONIC:
        sup = 1.0 / (1.0 - f.alpha)
        props = FunctionProps(False, False, True, True, 0.0, 0.0)
        return props, RangeDescriptor(0.0, sup, False)
    if kind == QUASI:
        p, a = f.p, f.alpha
        edge = (1.0 - a) ** (1.0 / p)
        if p > 0:
            props = FunctionProps(False, False, True, False, edge, a ** (1.0 / p))
            return props, RangeDescriptor(edge, math.inf, False)
        props = FunctionProps(False, False, True, True, 0.0, 0.0)
        return props, RangeDescriptor(0.0, edge, False)
    if kind in (LOGARITHMIC, DUAL_LOGARITHMIC):
        props = FunctionProps(False, False, True, False, 0.0, 0.0)
        return props, RangeDescriptor(0.0, math.inf, False)
    if kind == CUSTOM:
        return _analyze_custom(f)
    raise ValueError(f"unknown function kind {kind!r}")


def _analyze_custom(f: FunctionSpec) -> tuple[FunctionProps, RangeDescriptor]:
    # probe at x = 10^k, k <= 12; all derived facts flagged as numeric
    xs = np.concatenate([[0.0], np.geomspace(1e-6, 1e12, 73)])
    ys = eval_fn(f, xs)
    f0 = float(ys[0])
    spread = float(ys.max() - ys.min())
    is_const = spread <= 1e-12 * (1.0 + abs(f0))
    tail_slope = float(ys[-1] / xs[-1])
    prev_slope = float(ys[-2] / xs[-2])
    # slope at infinity ~ f(x)/x; treat a still-shrinking slope as 0
    transpose_f0 = tail_slope if tail_slope > 0.5 * prev_slope else 0.0
    bounded = ys[-1] - ys[-2] <= 1e-9 * (1.0 + ys[-1])
    upper = float(ys[-1]) if bounded else math.inf
    props = FunctionProps(
        is_const, False, not is_const, bool(bounded), f0, transpose_f0
    )
    return props, RangeDescriptor(f0, upper, is_const, numeric_estimate=True)


def in_range(
    y: float, rng: RangeDescriptor, range_tol: float
) -> tuple[bool, float]:
    """Membership of ``y`` in a (half-open) range, with asymmetric slack.

    Returns ``(accepted, gap)``.  ``y`` is accepted when
    ``y >= lower - range_tol`` and, for bounded ranges, when
    ``y <= upper - range_tol`` if the supremum is not attained or
    ``y <= upper + range_tol`` if it is.  ``gap`` is the signed distance
    beyond the violated bound (0 when accepted).
    """
    if y < rng.lower - range_tol:
        return False, rng.lower - y
    if math.isinf(rng.upper):
        return True, 0.0
    cap = rng.upper + range_tol if rng.upper_attained else rng.upper - range_tol
    if y > cap:
        return False, y - rng.upper
    return True, 0.0


# ---------------------------------------------------------------------------
# inversion
# ---------------------------------------------------------------------------


def _bisect_monotone(
    f: FunctionSpec, y: np.ndarray, bracket_hint=None
) -> np.ndarray:
    """Vectorized monotone bisection for nondecreasing catalog/custom f.

    The initial bracket is [0, 1], with the upper end expanded by
    factors of 10 until ``f(hi) >= y`` (or past 1e15, which raises
    RangeError).  Terminates when ``|f(x) - y| <= 1e-12 (1 + |y|)``
    componentwise, or when the bracket collapses to float resolution.
    """
    lo = np.zeros_like(y)
    if bracket_hint is not None:
        lo = np.full_like(y, float(bracket_hint[0]))
        hi = np.full_like(y, float(bracket_hint[1]))
    else:
        hi = np.ones_like(y)
        while True:
            short = eval_fn(f, hi) < y
            if not short.any():
                break
            hi[short] *= 10.0
            if np.any(hi > BISECT_MAX_HI):
                worst = float(np.max(y - eval_fn(f, np.full_like(y, BISECT_MAX_HI))))
                raise RangeError(
                    "no bracket below 1e15 reaches the target value "
                    f"(shortfall {worst:.3e})",
                    gap=worst,
                )
    tol = BISECT_TOL * (1.0 + np.abs(y))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = eval_fn(f, mid)
        done = np.abs(fm - y) <= tol
        if done.all():
            return mid
        below = fm < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all((hi - lo) <= 1e-17 * np.maximum(1.0, np.abs(mid))):
            return mid
    return 0.5 * (lo + hi)


def _invert_array(f: FunctionSpec, y: np.ndarray, bracket_hint=None) -> np.ndarray:
    kind = f.kind
    if kind == SCALAR_IDENTITY:
        return y / f.k
    if kind == ARITHMETIC:
        return (y - (1.0 - f.alpha)) / f.alpha
    if kind == GEOMETRIC:
        return y ** (1.0 / f.alpha)
    if kind == HARMONIC:
        return f.alpha * y / (1.0 - (1.0 - f.alpha) * y)
    if kind == QUASI:
        # f^{-1} is the same power form with weight 1/alpha
        p, a = f.p, f.alpha
        out = np.empty_like(y)
        pos = y > 0
        with np.errstate(over="ignore"):
            base = (1.0 - 1.0 / a) + (y[pos] ** p) / a
            out[pos] = np.maximum(base, 0.0) ** (1.0 / p)
        out[~pos] = 0.0  # continuity limit at the lower endpoint (p < 0)
        return out
    return _bisect_monotone(f, y, bracket_hint)


def eval_inverse(
    f: FunctionSpec,
    y,
    bracket_hint=None,
    range_tol: float = 1e-8,
):
    """Invert ``f`` at scalar or array targets inside its range.

    Closed forms cover the power/affine catalog members; the
    logarithmic pair and custom functions fall back to monotone
    bisection with geometric bracket expansion.

    Raises
    ------
    NotInjectiveError
        For constant ``f``.
    RangeError
        When a target lies outside the range of ``f`` (the violating
        gap is attached to the exception).
    """
    props, rng = analyze_fn(f)
    if not props.injective:
        raise NotInjectiveError(
            f"{f.describe()} is constant and cannot be inverted"
        )
    arr = np.atleast_1d(np.asarray(y, dtype=float))
    for val in arr:
        ok, gap = in_range(float(val), rng, range_tol)
        if not ok:
            raise RangeError(
                f"target {val:.12g} outside range "
                f"[{rng.lower:.12g}, {rng.upper:.12g}"
                + ("]" if rng.upper_attained else ")")
                + f" by {gap:.3e}",
                gap=gap,
            )
    # clamp targets into the closed range so boundary roundoff is benign
    clipped = np.clip(arr, rng.lower, None)
    if not math.isinf(rng.upper) and not rng.upper_attained:
        clipped = np.minimum(clipped, np.nextafter(rng.upper, 0.0))
    out = _invert_array(f, clipped, bracket_hint)
    if np.asarray(y).ndim == 0:
        return float(out[0])
    return out.reshape(np.asarray(y).shape)


# ---------------------------------------------------------------------------
# transpose
# ---------------------------------------------------------------------------


def transpose_fn(f: FunctionSpec) -> FunctionSpec:
    """The transpose ``g(x) = x f(1/x)`` (with ``g(0)`` by continuity).

    Catalog members map onto catalog members: the constant and the
    scalar identity swap, weighted members swap ``alpha`` for
    ``1 - alpha`` and the logarithmic pair members are self-transpose.
    """
    kind = f.kind
    if kind == CONSTANT:
        return scalar_identity(f.k)
    if kind == SCALAR_IDENTITY:
        return constant(f.k)
    if kind == ARITHMETIC:
        return arithmetic(1.0 - f.alpha)
    if kind == GEOMETRIC:
        return geometric(1.0 - f.alpha)
    if kind == HARMONIC:
        return harmonic(1.0 - f.alpha)
    if kind == QUASI:
        return quasi_arithmetic(f.p, 1.0 - f.alpha)
    if kind in (LOGARITHMIC, DUAL_LOGARITHMIC):
        return f
    props, _ = analyze_fn(f)
    g0 = props.transpose_f0

    def transposed(x, _f=f, _g0=g0):
        if x == 0.0:
            return _g0
        return x * eval_fn(_f, 1.0 / x)

    return replace(
        custom(transposed, check_grid=False),
        label=f"transpose({f.label or 'custom'})",
        operator_monotone_certified=f.operator_monotone_certified,
    )
