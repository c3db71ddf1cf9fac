"""Lattice index sets, region decomposition, stencils and discrete norms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .potential import EamParams

R_CUT = 2
RHO = np.array([-2, -1, 1, 2])


class ConfigError(ValueError):
    """Raised when region sizes violate 0 < K < Kbar <= L <= N."""


class DimensionError(ValueError):
    """Raised when a field does not cover the sites a model needs."""


@dataclass(frozen=True)
class SiteRange:
    """Inclusive site range pair ``{-hi..-lo} U {lo..hi}``; empty if lo > hi."""

    lo: int
    hi: int

    def __contains__(self, xi: int) -> bool:
        return self.lo <= abs(xi) <= self.hi

    def __len__(self) -> int:
        return 2 * max(0, self.hi - self.lo + 1)

    def sites(self) -> np.ndarray:
        pos = np.arange(self.lo, self.hi + 1)
        return np.concatenate([-pos[::-1], pos])


@dataclass(frozen=True)
class RegionPartition:
    """Site sets and continuum intervals of a QNL/QNLL decomposition.

    ``lambda_a`` is stored as the symmetric range ``{-K..K}``; the interval
    tuples hold the positive half ``[lo, hi]`` of each symmetric pair.
    """

    K: int
    Kbar: int
    L: int
    N: int

    @property
    def lambda_a(self) -> tuple[int, int]:
        return (-self.K, self.K)

    @property
    def lambda_i(self) -> SiteRange:
        return SiteRange(self.Kbar - 1, self.Kbar)

    @property
    def lambda_nl(self) -> SiteRange:
        return SiteRange(self.Kbar + 1, self.L)

    @property
    def lambda_l(self) -> SiteRange:
        return SiteRange(self.L + 1, self.N)

    @property
    def omega_a(self) -> tuple[int, int]:
        return (-self.K - 1, self.K + 1)

    @property
    def omega_a_interior(self) -> tuple[int, int]:
        """Cells whose every interacting bond stays inside the atomistic core."""
        return (-self.K + 1, self.K - 1)

    @property
    def omega_i(self) -> tuple[int, int]:
        return (self.Kbar - 1, self.Kbar)

    @property
    def omega_nl(self) -> tuple[int, int]:
        return (self.Kbar, self.L)

    @property
    def omega_l(self) -> tuple[int, int]:
        return (self.L, self.N)

    def region_of(self, xi: int) -> str:
        if abs(xi) > self.N:
            raise ValueError(f"site {xi} outside [-{self.N}, {self.N}]")
        if abs(xi) <= self.K:
            return "a"
        if xi in self.lambda_i:
            return "i"
        if xi in self.lambda_nl:
            return "nl"
        return "l"


@dataclass(frozen=True)
class ProblemConfig:
    N: int
    K: int
    L: int
    F: float = 1.0
    alpha: float = 1.2
    eam: EamParams = field(default_factory=EamParams)
    r_cut: int = R_CUT

    @property
    def Kbar(self) -> int:
        return self.K + self.r_cut

    @property
    def regions(self) -> RegionPartition:
        return RegionPartition(self.K, self.Kbar, self.L, self.N)

    @property
    def n_sites(self) -> int:
        return 2 * self.N + 1


def make_config(N: int, K: int, L: int, F: float = 1.0, alpha: float = 1.2,
                eam: EamParams | None = None) -> ProblemConfig:
    """Validate region sizes and build a :class:`ProblemConfig`."""
    if K <= 0 or N <= 0:
        raise ConfigError(f"K and N must be positive (K={K}, N={N})")
    if F <= 0:
        raise ConfigError(f"F must be positive, got {F}")
    if alpha <= 0.5:
        raise ConfigError(f"alpha must exceed 1/2, got {alpha}")
    Kbar = K + R_CUT
    if L < Kbar:
        raise ConfigError(f"L < Kbar (L={L}, Kbar={Kbar})")
    if L > N:
        raise ConfigError(f"L > N (L={L}, N={N})")
    return ProblemConfig(int(N), int(K), int(L), float(F), float(alpha),
                         eam if eam is not None else EamParams())


@dataclass(frozen=True)
class LatticeField:
    """Values on consecutive lattice sites ``lo, lo+1, ...``."""

    lo: int
    values: np.ndarray

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def at(self, xi, default: float = 0.0):
        """Value at site(s) ``xi``; sites outside the stored range get ``default``."""
        xi = np.asarray(xi)
        k = xi - self.lo
        inside = (k >= 0) & (k < len(self.values))
        out = np.where(inside, self.values[np.clip(k, 0, len(self.values) - 1)], default)
        return out if out.ndim else float(out)

    def __add__(self, other: "LatticeField") -> "LatticeField":
        if self.lo != other.lo or len(self.values) != len(other.values):
            raise DimensionError("fields live on different site ranges")
        return LatticeField(self.lo, self.values + other.values)

    def __sub__(self, other: "LatticeField") -> "LatticeField":
        return self + LatticeField(other.lo, -other.values)


def homogeneous(cfg: ProblemConfig, pad: int = 0) -> LatticeField:
    """Deformation ``y = F x`` on ``[-N-pad, N+pad]``."""
    lo = -cfg.N - pad
    return LatticeField(lo, cfg.F * np.arange(lo, cfg.N + pad + 1, dtype=float))


def deformation(cfg: ProblemConfig, u: np.ndarray | LatticeField) -> LatticeField:
    """``y = F x + u`` for a displacement given on ``[-N, N]``."""
    if isinstance(u, LatticeField):
        return LatticeField(u.lo, cfg.F * u.sites + u.values)
    u = np.asarray(u, dtype=float)
    if len(u) != cfg.n_sites:
        raise DimensionError(f"expected {cfg.n_sites} values, got {len(u)}")
    return LatticeField(-cfg.N, cfg.F * np.arange(-cfg.N, cfg.N + 1) + u)


def stencil(y: LatticeField, xi: int, F: float = 1.0) -> np.ndarray:
    """Finite differences ``(D_-2 y, D_-1 y, D_1 y, D_2 y)`` at site ``xi``.

    Sites outside the stored range follow the homogeneous extension ``y = F x``.
    """
    nbrs = xi + RHO
    yn = np.array([y.at(s, F * s) for s in nbrs])
    return yn - y.at(xi, F * xi)


def grad_l2_norm(u: LatticeField) -> float:
    """``||grad u||_{L2}`` of a displacement, zero-extended outside its range."""
    vals = np.concatenate([[0.0], np.asarray(u.values, dtype=float), [0.0]])
    return float(np.sqrt(np.sum(np.diff(vals) ** 2)))
