"""Spectral calculus for real symmetric matrices.

Provides the matrix types used throughout the toolkit (symmetric,
positive semidefinite, positive definite), eigendecomposition with
validated reconstruction, matrix functions through the spectral
calculus, Loewner-order comparisons and congruence transforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DimMismatchError,
    DomainError,
    NonFiniteError,
    NotPdError,
    NotPsdError,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "SymmetricMatrix",
    "PsdMatrix",
    "PdMatrix",
    "EigenDecomposition",
    "eigh",
    "apply_fn",
    "loewner_leq",
    "min_eigenvalue",
    "sqrt_pair",
    "congruence",
    "is_projection",
    "frobenius",
]

#: Hard cap on matrix dimension for the verification harness.
MAX_HARNESS_DIM = 32


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances used across validation, ordering and solving.

    psd_tol
        Validation slack for positive semidefiniteness; eigenvalues in
        ``[-psd_tol, 0)`` are clamped to zero, and eigenvalues at most
        ``psd_tol`` are treated as exact zeros by the evaluation paths.
    order_tol
        Slack for Loewner-order comparisons (eigenvalue sense).
    range_tol
        Slack for membership of a spectrum in the range of a
        representing function.
    solve_rtol
        Relative residual bound certifying a unique solution.
    """

    psd_tol: float = 1e-10
    order_tol: float = 1e-8
    range_tol: float = 1e-8
    solve_rtol: float = 1e-7

    def __post_init__(self):
        for name in ("psd_tol", "order_tol", "range_tol", "solve_rtol"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


DEFAULT_TOLERANCES = Tolerances()


def _as_square_array(entries) -> np.ndarray:
    a = np.array(entries, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimMismatchError(f"expected a square matrix, got shape {a.shape}")
    return a


def frobenius(m) -> float:
    """Frobenius norm of a matrix or matrix wrapper."""
    return float(np.linalg.norm(np.asarray(m)))


class SymmetricMatrix:
    """A real symmetric matrix.

    Input entries are symmetrized via ``(M + M.T) / 2`` so the stored
    array is exactly symmetric.  The array is frozen after construction;
    all operations on these wrappers are pure.
    """

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = _as_square_array(entries)
        a = (a + a.T) / 2.0
        a.setflags(write=False)
        self._a = a

    @classmethod
    def wrap(cls, value) -> "SymmetricMatrix":
        """Return ``value`` if it is already of this type, else construct."""
        if isinstance(value, cls):
            return value
        if isinstance(value, SymmetricMatrix):
            return cls(value.entries)
        return cls(value)

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """The underlying (read-only) ndarray."""
        return self._a

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return self._a.astype(dtype)
        return self._a

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigendecomposition ``A = Q diag(eigenvalues) Q.T``.

    Eigenvalues are ascending; eigenvector columns are orthonormal.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T


def eigh(a) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix, with validated residuals.

    Raises
    ------
    NonFiniteError
        If any entry is NaN or infinite.
    """
    m = SymmetricMatrix.wrap(a).entries
    if not np.isfinite(m).all():
        raise NonFiniteError("matrix has non-finite entries")
    w, q = np.linalg.eigh(m)
    dec = EigenDecomposition(w, q)
    scale = 1.0 + frobenius(m)
    if frobenius(dec.reconstruct() - m) > 1e-10 * scale:
        raise ArithmeticError("eigendecomposition failed reconstruction check")
    if frobenius(q.T @ q - np.eye(m.shape[0])) > 1e-10:
        raise ArithmeticError("eigenvectors failed orthonormality check")
    return dec


class PsdMatrix(SymmetricMatrix):
    """A positive semidefinite symmetric matrix.

    Validation requires the minimum eigenvalue to be at least
    ``-tolerance``; eigenvalues below zero are then clamped to zero and
    the matrix is rebuilt from the clamped spectrum, so functions of the
    matrix see a clean ``0`` where roundoff produced tiny negatives.
    """

    __slots__ = ("_dec", "tolerance")

    def __init__(self, entries, tolerance: float = DEFAULT_TOLERANCES.psd_tol):
        super().__init__(entries)
        if not np.isfinite(self._a).all():
            raise NonFiniteError("matrix has non-finite entries")
        w, q = np.linalg.eigh(self._a)
        if w[0] < -tolerance:
            raise NotPsdError(
                f"minimum eigenvalue {w[0]:.6e} below -{tolerance:.1e}"
            )
        if w[0] < 0.0:
            w = np.maximum(w, 0.0)
            a = (q * w) @ q.T
            a = (a + a.T) / 2.0
            a.setflags(write=False)
            self._a = a
        self._dec = EigenDecomposition(w, q)
        self.tolerance = tolerance

    @property
    def decomposition(self) -> EigenDecomposition:
        """Cached eigendecomposition (computed at validation time)."""
        return self._dec

    @property
    def min_eigenvalue(self) -> float:
        return float(self._dec.eigenvalues[0])


class PdMatrix(PsdMatrix):
    """A strictly positive definite symmetric matrix."""

    __slots__ = ()

    def __init__(self, entries, tolerance: float = DEFAULT_TOLERANCES.psd_tol):
        super().__init__(entries, tolerance=tolerance)
        if self.min_eigenvalue <= tolerance:
            raise NotPdError(
                f"minimum eigenvalue {self.min_eigenvalue:.6e} "
                f"not above {tolerance:.1e}"
            )


def _psd_from_decomposition(cls, w, q, tolerance: float):
    """Build a PSD/PD wrapper from a known spectrum, skipping revalidation.

    Internal fast path: the caller guarantees ``w`` is the (ascending,
    nonnegative) spectrum belonging to the orthonormal columns ``q``.
    """
    obj = cls.__new__(cls)
    a = (q * w) @ q.T
    a = (a + a.T) / 2.0
    a.setflags(write=False)
    obj._a = a
    obj._dec = EigenDecomposition(w, q)
    obj.tolerance = tolerance
    return obj


def _check_same_dim(a: SymmetricMatrix, b: SymmetricMatrix):
    if a.dim != b.dim:
        raise DimMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")


def apply_fn(
    a,
    phi: Callable,
    zero_tol: float | None = None,
) -> SymmetricMatrix:
    """Apply a scalar function to a PSD matrix through its spectrum.

    Returns ``Q phi(L) Q.T`` where ``A = Q L Q.T``.  The result commutes
    with ``A`` and is symmetric but need not be PSD (``phi`` may take
    negative values).

    Parameters
    ----------
    a : PsdMatrix or array_like
        The matrix argument.
    phi : callable
        Scalar function defined on the eigenvalues of ``a``; may be
        vectorized or scalar-only.
    zero_tol : float, optional
        If given, eigenvalues at most ``zero_tol`` are evaluated as an
        exact ``0.0`` before applying ``phi``.  Used by the connection
        evaluation path, where numerically-zero eigenvalues must follow
        the ``phi(0)`` convention.

    Raises
    ------
    DomainError
        If ``phi`` is undefined (raises, or returns a non-finite value)
        at some eigenvalue.
    """
    a = PsdMatrix.wrap(a)
    w = a.decomposition.eigenvalues.copy()
    if zero_tol is not None:
        w[w <= zero_tol] = 0.0
    try:
        vals = np.asarray(phi(w), dtype=float)
        if vals.shape != w.shape:
            raise TypeError
    except DomainError:
        raise
    except Exception:
        try:
            vals = np.array([float(phi(x)) for x in w])
        except Exception as exc:  # noqa: BLE001 - reported as a domain failure
            raise DomainError(f"function raised on spectrum: {exc}") from exc
    if not np.isfinite(vals).all():
        bad = w[~np.isfinite(vals)]
        raise DomainError(f"function undefined at eigenvalue(s) {bad}")
    q = a.decomposition.eigenvectors
    return SymmetricMatrix((q * vals) @ q.T)


def min_eigenvalue(a) -> float:
    """Smallest eigenvalue of a symmetric matrix."""
    if isinstance(a, PsdMatrix):
        return a.min_eigenvalue
    return float(eigh(a).eigenvalues[0])


def loewner_leq(a, b, tol: float = DEFAULT_TOLERANCES.order_tol) -> bool:
    """Loewner order test: ``A <= B`` iff ``B - A`` is PSD up to ``tol``.

    True iff the minimum eigenvalue of ``B - A`` is at least ``-tol``.
    """
    a = SymmetricMatrix.wrap(a)
    b = SymmetricMatrix.wrap(b)
    _check_same_dim(a, b)
    return min_eigenvalue(SymmetricMatrix(b.entries - a.entries)) >= -tol


def sqrt_pair(
    a, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> tuple[PdMatrix, PdMatrix]:
    """Return ``(A^{1/2}, A^{-1/2})`` for strictly positive definite ``A``.

    Raises
    ------
    NotPdError
        If the minimum eigenvalue is not above ``tolerances.psd_tol``.
    """
    if not isinstance(a, PdMatrix):
        a = PdMatrix(np.asarray(a), tolerance=tolerances.psd_tol)
    w = a.decomposition.eigenvalues
    q = a.decomposition.eigenvectors
    root = np.sqrt(w)
    half = _psd_from_decomposition(PdMatrix, root, q, tolerances.psd_tol)
    inv_half = _psd_from_decomposition(PdMatrix, (1.0 / root)[::-1], q[:, ::-1], 0.0)
    return half, inv_half


def congruence(c, a, tolerances: Tolerances = DEFAULT_TOLERANCES) -> PsdMatrix:
    """Congruence transform ``C A C`` for symmetric ``C`` and PSD ``A``."""
    c = SymmetricMatrix.wrap(c)
    a = PsdMatrix.wrap(a)
    _check_same_dim(c, a)
    r = c.entries @ a.entries @ c.entries
    # mathematically PSD; validation slack scales with the product norm
    return PsdMatrix(r, tolerance=tolerances.psd_tol * (1.0 + frobenius(r)))


def is_projection(a, tol: float = DEFAULT_TOLERANCES.order_tol) -> bool:
    """True iff every eigenvalue is within ``tol`` of 0 or 1."""
    a = PsdMatrix.wrap(a)
    w = a.decomposition.eigenvalues
    return bool(np.all(np.minimum(np.abs(w), np.abs(w - 1.0)) <= tol))
