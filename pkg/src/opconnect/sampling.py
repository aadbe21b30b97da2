"""Seeded random matrix generation for harnesses, tests and demos."""

from __future__ import annotations

import numpy as np

from .symcore import PdMatrix, PsdMatrix, SymmetricMatrix

__all__ = [
    "random_orthogonal",
    "random_symmetric",
    "random_symmetric_invertible",
    "random_pd",
    "random_psd",
    "random_singular_psd",
    "random_projection",
    "random_commuting_pair",
]


def random_orthogonal(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def random_symmetric(rng, dim, scale: float = 1.0) -> SymmetricMatrix:
    """Gaussian symmetric matrix (indefinite in general)."""
    g = rng.standard_normal((dim, dim))
    return SymmetricMatrix(scale * (g + g.T) / 2.0)


def random_symmetric_invertible(rng, dim, magnitude=(0.3, 1.5)) -> SymmetricMatrix:
    """Symmetric matrix with eigenvalues of random sign, bounded away from 0."""
    q = random_orthogonal(rng, dim)
    vals = rng.uniform(*magnitude, size=dim) * rng.choice([-1.0, 1.0], size=dim)
    return SymmetricMatrix((q * vals) @ q.T)


def random_pd(rng, dim, eig_range=(0.2, 3.0)) -> PdMatrix:
    """Positive definite matrix with eigenvalues uniform in ``eig_range``."""
    q = random_orthogonal(rng, dim)
    vals = rng.uniform(*eig_range, size=dim)
    return PdMatrix((q * vals) @ q.T)


def random_psd(rng, dim, eig_range=(0.0, 3.0), zeros: int = 0) -> PsdMatrix:
    """PSD matrix; ``zeros`` eigenvalues are pinned to exactly 0."""
    q = random_orthogonal(rng, dim)
    vals = rng.uniform(*eig_range, size=dim)
    if zeros:
        vals[:zeros] = 0.0
    return PsdMatrix((q * vals) @ q.T)


def random_singular_psd(rng, dim, zeros: int = 1, eig_range=(0.2, 3.0)) -> PsdMatrix:
    """PSD matrix with a prescribed number of zero eigenvalues."""
    if not 1 <= zeros <= dim:
        raise ValueError("zeros must be between 1 and dim")
    q = random_orthogonal(rng, dim)
    vals = rng.uniform(*eig_range, size=dim)
    vals[:zeros] = 0.0
    return PsdMatrix((q * vals) @ q.T)


def random_projection(rng, dim, rank: int | None = None) -> PsdMatrix:
    """Orthogonal projection of the given (or random) rank."""
    if rank is None:
        rank = int(rng.integers(0, dim + 1))
    if rank == 0:
        return PsdMatrix(np.zeros((dim, dim)))
    q = random_orthogonal(rng, dim)[:, :rank]
    return PsdMatrix(q @ q.T)


def random_commuting_pair(rng, dim, eig_range=(0.2, 3.0)):
    """Two PD matrices sharing an eigenbasis (hence commuting)."""
    q = random_orthogonal(rng, dim)
    a = rng.uniform(*eig_range, size=dim)
    b = rng.uniform(*eig_range, size=dim)
    return PdMatrix((q * a) @ q.T), PdMatrix((q * b) @ q.T)
