"""Finite Borel measures on [0, 1] and integral representations.

Every connection is an average of weighted harmonic means against a
finite Borel measure on the unit interval:

    A sigma B   = integral of A !_t B  d mu(t)
    f(x)        = integral of 1 !_t x  d mu(t)

where ``A !_t B = ((1-t) A^{-1} + t B^{-1})^{-1}``.  Measures are
stored as point masses plus an absolutely continuous density carried by
a fixed quadrature rule; atoms at the endpoints are kept exact because
``f(0) = mu({0})`` and the slope at infinity equals ``mu({1})``.
Singularly continuous parts are not representable and are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import functions as fns
from .errors import DimMismatchError, NoConvergenceError
from .symcore import (
    DEFAULT_TOLERANCES,
    PsdMatrix,
    Tolerances,
    frobenius,
)

__all__ = [
    "FiniteMeasure",
    "from_atoms",
    "point_mass",
    "arcsine",
    "from_density",
    "gauss_legendre_01",
    "scalar_harmonic",
    "weighted_harmonic",
    "fn_from_measure",
    "eval_from_measure",
    "mass",
    "is_probability",
    "known_measure_of",
    "transpose_measure",
]

DEFAULT_QUADRATURE_NODES = 200


def gauss_legendre_01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to (0, 1)."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


@dataclass(frozen=True, eq=False)
class FiniteMeasure:
    """A finite positive Borel measure on [0, 1].

    atoms
        Point masses ``(t, w)`` with distinct locations in [0, 1].
    density
        Optional nonnegative density on (0, 1), kept for reference.
    nodes, weights
        Quadrature rule absorbing the density: integrals of ``h`` against
        the absolutely continuous part are ``sum(weights * h(nodes))``.
    """

    atoms: tuple[tuple[float, float], ...] = ()
    density: Callable[[float], float] | None = field(default=None)
    nodes: np.ndarray | None = None
    weights: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        locs = [t for t, _ in self.atoms]
        if len(set(locs)) != len(locs):
            raise ValueError("atom locations must be distinct")
        for t, w in self.atoms:
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"atom location {t} outside [0, 1]")
            if not np.isfinite(w) or w < 0.0:
                raise ValueError(f"atom weight {w} must be finite and >= 0")
        if (self.nodes is None) != (self.weights is None):
            raise ValueError("quadrature nodes and weights come together")
        if self.nodes is not None:
            nodes = np.asarray(self.nodes, dtype=float)
            weights = np.asarray(self.weights, dtype=float)
            if nodes.shape != weights.shape or nodes.ndim != 1:
                raise ValueError("quadrature rule must be two equal vectors")
            if np.any((nodes <= 0.0) | (nodes >= 1.0)):
                raise ValueError("quadrature nodes must lie strictly in (0, 1)")
            if np.any(weights < 0.0) or not np.isfinite(weights).all():
                raise ValueError("quadrature weights must be finite and >= 0")
            nodes.setflags(write=False)
            weights.setflags(write=False)
            object.__setattr__(self, "nodes", nodes)
            object.__setattr__(self, "weights", weights)

    def atom_weight(self, t: float) -> float:
        """Point mass at location ``t`` (0.0 if absent)."""
        for loc, w in self.atoms:
            if loc == t:
                return w
        return 0.0

    def scaled(self, k: float) -> "FiniteMeasure":
        """The measure ``k * mu``."""
        if k < 0:
            raise ValueError("scale must be nonnegative")
        return FiniteMeasure(
            atoms=tuple((t, k * w) for t, w in self.atoms),
            density=self.density,
            nodes=self.nodes,
            weights=None if self.weights is None else k * self.weights,
            label=self.label,
        )

    def describe(self) -> str:
        parts = []
        if self.atoms:
            inner = ",".join(f"({t:g},{w:g})" for t, w in self.atoms)
            parts.append(f"atoms=[{inner}]")
        if self.nodes is not None:
            name = self.label or "table"
            parts.append(f"density={name} nodes={self.nodes.size}")
        return " ".join(parts) if parts else "zero measure"


def from_atoms(atoms) -> FiniteMeasure:
    """Purely atomic measure from ``[(t, w), ...]``."""
    return FiniteMeasure(atoms=tuple((float(t), float(w)) for t, w in atoms))


def point_mass(t: float, w: float = 1.0) -> FiniteMeasure:
    """The Dirac measure ``w * delta_t``."""
    return from_atoms([(t, w)])


def arcsine(n: int = DEFAULT_QUADRATURE_NODES) -> FiniteMeasure:
    """The arcsine distribution ``dt / (pi sqrt(t (1 - t)))``.

    This is the associated measure of the geometric mean with weight
    one half.  The endpoint singularities are removed exactly by the
    substitution ``t = sin^2(theta)``, leaving a smooth integrand for
    Gauss-Legendre quadrature; with that substitution the rule
    integrates constants exactly, so the stored mass is exactly 1.
    """
    x, w = np.polynomial.legendre.leggauss(n)
    theta = (x + 1.0) * (np.pi / 4.0)
    return FiniteMeasure(
        density=lambda t: 1.0 / (np.pi * np.sqrt(t * (1.0 - t))),
        nodes=np.sin(theta) ** 2,
        weights=(0.5 * w),  # (pi/4) * w * (2/pi)
        label="arcsine",
    )


def from_density(
    density: Callable[[float], float],
    n: int = DEFAULT_QUADRATURE_NODES,
    endpoint_substitution: bool = False,
    atoms=(),
    label: str = "",
) -> FiniteMeasure:
    """Measure with density ``rho`` on (0, 1) plus optional atoms.

    With ``endpoint_substitution`` the rule is built in the variable
    ``t = sin^2(theta)``, which removes integrable singularities of the
    form ``t^{-1/2}`` or ``(1-t)^{-1/2}`` at the endpoints.
    """
    if endpoint_substitution:
        x, w = np.polynomial.legendre.leggauss(n)
        theta = (x + 1.0) * (np.pi / 4.0)
        nodes = np.sin(theta) ** 2
        jac = 2.0 * np.sin(theta) * np.cos(theta) * (np.pi / 4.0)
        weights = w * jac * np.array([density(t) for t in nodes])
    else:
        nodes, base = gauss_legendre_01(n)
        weights = base * np.array([density(t) for t in nodes])
    return FiniteMeasure(
        atoms=tuple((float(t), float(w_)) for t, w_ in atoms),
        density=density,
        nodes=nodes,
        weights=weights,
        label=label,
    )


# ---------------------------------------------------------------------------
# weighted harmonic means
# ---------------------------------------------------------------------------


def scalar_harmonic(t, x):
    """``1 !_t x = x / ((1 - t) x + t)`` with ``1 !_0 x = 1, 1 !_1 x = x``."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = x / ((1.0 - t) * x + t)
    # the formula already gives 1 at t=0 (x>0) and x at t=1; the only
    # indeterminate point is t=0, x=0 where the convention is 1
    out = np.where((t == 0.0) & (x == 0.0), 1.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def _harmonic_pd(a: np.ndarray, b: np.ndarray, t: float) -> np.ndarray:
    inv = np.linalg.inv
    m = inv((1.0 - t) * inv(a) + t * inv(b))
    return (m + m.T) / 2.0


def weighted_harmonic(
    a,
    b,
    t: float,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    epsilons=None,
    convergence_tol: float | None = None,
) -> PsdMatrix:
    """The weighted harmonic mean ``A !_t B`` of PSD matrices.

    Endpoints are exact (``t = 0`` gives A, ``t = 1`` gives B).  For
    invertible operands the closed form
    ``((1-t) A^{-1} + t B^{-1})^{-1}`` applies; singular operands are
    handled as the decreasing limit of ``(A + eps I) !_t (B + eps I)``
    along a regularization schedule.
    """
    a = PsdMatrix.wrap(a)
    b = PsdMatrix.wrap(b)
    if a.dim != b.dim:
        raise DimMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"weight t={t} outside [0, 1]")
    if t == 0.0:
        return a
    if t == 1.0:
        return b
    tol = tolerances.psd_tol
    if min(a.min_eigenvalue, b.min_eigenvalue) > tol:
        m = _harmonic_pd(a.entries, b.entries, t)
        return PsdMatrix(m, tolerance=tol * (1.0 + frobenius(m)))
    if epsilons is None:
        from .connection import DEFAULT_SCHEDULE

        epsilons = DEFAULT_SCHEDULE.epsilons
        if convergence_tol is None:
            convergence_tol = DEFAULT_SCHEDULE.convergence_tol
    if convergence_tol is None:
        convergence_tol = 1e-7
    eye = np.eye(a.dim)
    prev = None
    gap = None
    for eps in epsilons:
        cur = _harmonic_pd(a.entries + eps * eye, b.entries + eps * eye, t)
        if prev is not None:
            gap = frobenius(cur - prev)
            if gap <= convergence_tol:
                return PsdMatrix(cur, tolerance=tol * (1.0 + frobenius(cur)))
        prev = cur
    raise NoConvergenceError(
        f"harmonic-mean regularization did not converge (last gap {gap:.3e})",
        last_gap=gap,
    )


# ---------------------------------------------------------------------------
# integral representation
# ---------------------------------------------------------------------------


def fn_from_measure(mu: FiniteMeasure, x):
    """Representing function of the measure: integral of ``1 !_t x``."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros_like(arr)
    for t, w in mu.atoms:
        out += w * scalar_harmonic(t, arr)
    if mu.nodes is not None:
        out += scalar_harmonic(mu.nodes[:, None], arr[None, :]).T @ mu.weights
    if np.asarray(x).ndim == 0:
        return float(out[0])
    return out.reshape(np.asarray(x).shape)


def eval_from_measure(
    mu: FiniteMeasure,
    a,
    b,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> PsdMatrix:
    """Evaluate the connection of ``mu`` directly from its integral form.

    Sums weighted harmonic means over atoms and quadrature nodes.  This
    is the cross-check path; the function path through the spectral
    calculus is tighter and is the default used by ``Connection``.
    """
    a = PsdMatrix.wrap(a)
    b = PsdMatrix.wrap(b)
    if a.dim != b.dim:
        raise DimMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    total = np.zeros((a.dim, a.dim))
    for t, w in mu.atoms:
        if w != 0.0:
            total += w * weighted_harmonic(a, b, t, tolerances).entries
    if mu.nodes is not None:
        pd = min(a.min_eigenvalue, b.min_eigenvalue) > tolerances.psd_tol
        if pd:
            ai = np.linalg.inv(a.entries)
            bi = np.linalg.inv(b.entries)
            for t, w in zip(mu.nodes, mu.weights):
                term = np.linalg.inv((1.0 - t) * ai + t * bi)
                total += w * term
        else:
            for t, w in zip(mu.nodes, mu.weights):
                total += w * weighted_harmonic(a, b, t, tolerances).entries
    return PsdMatrix(
        total, tolerance=tolerances.psd_tol * (1.0 + frobenius(total))
    )


def mass(mu: FiniteMeasure) -> float:
    """Total mass ``mu([0, 1])``."""
    total = sum(w for _, w in mu.atoms)
    if mu.weights is not None:
        total += float(mu.weights.sum())
    return float(total)


def is_probability(mu: FiniteMeasure, tol: float = 1e-10) -> bool:
    """True iff the total mass is 1 within ``tol``."""
    return abs(mass(mu) - 1.0) <= tol


def transpose_measure(mu: FiniteMeasure) -> FiniteMeasure:
    """Pushforward under ``t -> 1 - t`` (the measure of the transpose)."""
    nodes = None if mu.nodes is None else (1.0 - mu.nodes)[::-1].copy()
    weights = None if mu.weights is None else mu.weights[::-1].copy()
    density = None
    if mu.density is not None:
        density = lambda t, _d=mu.density: _d(1.0 - t)  # noqa: E731
    return FiniteMeasure(
        atoms=tuple((1.0 - t, w) for t, w in mu.atoms),
        density=density,
        nodes=nodes,
        weights=weights,
        label=mu.label,
    )


def known_measure_of(f: fns.FunctionSpec) -> FiniteMeasure | None:
    """Associated measure of a catalog function, where a closed form exists.

    constant k          -> k * delta_0
    scalar_identity k   -> k * delta_1
    arithmetic alpha    -> (1 - alpha) delta_0 + alpha delta_1
    harmonic alpha      -> delta_alpha
    geometric 1/2       -> arcsine density

    Returns None otherwise (notably the logarithmic pair, geometric
    weights other than one half and the remaining power family).
    """
    kind = f.kind
    if kind == fns.CONSTANT:
        return point_mass(0.0, f.k)
    if kind == fns.SCALAR_IDENTITY:
        return point_mass(1.0, f.k)
    if kind == fns.ARITHMETIC:
        return from_atoms([(0.0, 1.0 - f.alpha), (1.0, f.alpha)])
    if kind == fns.HARMONIC:
        return point_mass(f.alpha, 1.0)
    if kind == fns.GEOMETRIC and f.alpha == 0.5:
        return arcsine()
    return None
