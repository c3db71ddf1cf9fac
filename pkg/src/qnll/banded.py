"""Symmetric banded matrices in LAPACK upper storage."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded


@dataclass
class BandedSym:
    """Symmetric matrix with ``ab[u + i - j, j] = A[i, j]`` for ``i <= j``."""

    ab: np.ndarray

    @property
    def n(self) -> int:
        return self.ab.shape[1]

    @property
    def u(self) -> int:
        return self.ab.shape[0] - 1

    @classmethod
    def zeros(cls, n: int, u: int = 4) -> "BandedSym":
        return cls(np.zeros((u + 1, n)))

    @classmethod
    def from_dense(cls, A: np.ndarray, u: int = 4) -> "BandedSym":
        n = A.shape[0]
        ab = np.zeros((u + 1, n))
        for k in range(min(u, n - 1) + 1):
            # superdiagonal k lives in row u-k, columns k..n-1
            ab[u - k, k:] = np.diagonal(A, k)
        return cls(ab)

    def to_dense(self) -> np.ndarray:
        n, u = self.n, self.u
        A = np.zeros((n, n))
        for k in range(min(u, n - 1) + 1):
            d = self.ab[u - k, k:]
            A += np.diag(d, k)
            if k:
                A += np.diag(d, -k)
        return A

    def bandwidth(self) -> int:
        """Largest ``|i-j|`` with a nonzero entry."""
        for k in range(self.u, 0, -1):
            if np.any(self.ab[self.u - k, k:] != 0):
                return k
        return 0

    def submatrix(self, start: int, stop: int) -> "BandedSym":
        """Principal block on indices ``start..stop-1``."""
        ab = self.ab[:, start:stop].copy()
        for k in range(1, self.u + 1):
            ab[self.u - k, :k] = 0.0
        return BandedSym(ab)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        u = self.u
        y = self.ab[u] * x
        for k in range(1, min(u, self.n - 1) + 1):
            d = self.ab[u - k, k:]
            y[:-k] += d * x[k:]
            y[k:] += d * x[:-k]
        return y

    def shifted(self, tau: float) -> "BandedSym":
        ab = self.ab.copy()
        ab[self.u] += tau
        return BandedSym(ab)

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Cholesky solve; raises ``numpy.linalg.LinAlgError`` if not positive definite."""
        return solveh_banded(self.ab.copy(), b, overwrite_ab=True, check_finite=False)


def laplacian(n: int, u: int = 4) -> BandedSym:
    """Dirichlet discrete Laplacian ``tridiag(-1, 2, -1)`` of size ``n``."""
    A = BandedSym.zeros(n, u)
    A.ab[u] = 2.0
    A.ab[u - 1, 1:] = -1.0
    return A


def mesh_laplacian(h: np.ndarray, u: int = 4) -> BandedSym:
    """Stiffness matrix of ``||grad v||^2`` on a P1 mesh, free nodes only.

    ``h`` holds all element sizes; the two end nodes are eliminated.
    """
    k = 1.0 / np.asarray(h, dtype=float)
    n = len(k) - 1
    A = BandedSym.zeros(n, u)
    A.ab[u] = k[:-1] + k[1:]
    A.ab[u - 1, 1:] = -k[1:-1]
    return A
