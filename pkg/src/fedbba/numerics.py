"""Dense linear algebra and statistics primitives used by every other module.

Matrices are plain ``numpy`` 2-D arrays of float64 (row-major). All functions
are pure; :class:`RngStream` instances are single-owner.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDistribution, InvalidInput

VARIANCE_FLOOR = 1e-12


class RngStream:
    """Deterministic random stream keyed by ``(seed, stream_id)``.

    The same pair always yields the same draw sequence, across runs and
    platforms (PCG64). Streams are cheap; derive one per independent
    consumer instead of sharing a generator.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.gen = np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        )

    def substream(self, stream_id: int) -> "RngStream":
        """Fresh stream under the same seed with a different id."""
        return RngStream(self.seed, stream_id)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


@dataclass
class SvdResult:
    """Thin SVD ``X = U @ diag(singular_values) @ V.T``.

    U is n-by-r, V is d-by-r, singular values sorted descending, r = min(n, d).
    """

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.singular_values) @ self.V.T


def as_matrix(X) -> np.ndarray:
    """Validate and convert input to a 2-D float64 array."""
    A = np.asarray(X, dtype=float)
    if A.ndim != 2:
        raise InvalidInput(f"expected a 2-D matrix, got ndim={A.ndim}")
    return A


def mean_center(X) -> tuple[np.ndarray, np.ndarray]:
    """Subtract column means. Returns (centered matrix, column means)."""
    A = as_matrix(X)
    if A.size == 0:
        raise InvalidInput("mean_center: matrix is empty")
    means = A.mean(axis=0)
    return A - means, means


def svd(X) -> SvdResult:
    """Thin singular value decomposition of a finite matrix."""
    A = as_matrix(X)
    if A.size == 0:
        raise InvalidInput("svd: matrix is empty")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("svd: matrix has non-finite entries")
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    return SvdResult(U=U, singular_values=s, V=Vh.T)


def kurtosis(v) -> float:
    """Standardized fourth central moment, E[(X-mu)^4] / sigma^4.

    Uses population (1/n) moments. Raises DegenerateDistribution when the
    population variance is at or below the 1e-12 floor, which would blow up
    the projection-pursuit iteration.
    """
    x = np.asarray(v, dtype=float).ravel()
    if x.size < 2:
        raise InvalidInput("kurtosis: need at least 2 values")
    if not np.all(np.isfinite(x)):
        raise InvalidInput("kurtosis: non-finite values")
    d = x - x.mean()
    m2 = float(np.mean(d * d))
    if m2 <= VARIANCE_FLOOR:
        raise DegenerateDistribution(f"kurtosis: variance {m2:.3e} below floor")
    m4 = float(np.mean(d**4))
    return m4 / (m2 * m2)
