"""Energies, first and second variations, and stress fields of ATM, QNL, QNLL.

Everything is assembled on a sorted set of integer nodes. The full lattice
is the special case ``nodes = -N..N`` and a graded finite element mesh is
the coarse-grained case; site energies only ever touch nodes that are
consecutive lattice sites, and continuum terms are evaluated elementwise
with a constant gradient, so one assembler serves both.

Displacements are nodal vectors ``u`` with ``u[0] = u[-1] = 0``.
Internally three ghost nodes are appended on each side (the homogeneous
extension by default). The atomistic energy sums sites ``-N-1..N+1``: every
site whose stencil reaches a free node, i.e. the full-lattice energy
restricted to displacements clamped outside ``(-N, N)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from . import potential as pot
from .banded import BandedSym
from .lattice import DimensionError, LatticeField, ProblemConfig

GHOST = 3
RHO = np.array([-2.0, -1.0, 1.0, 2.0])
# stencil entries as differences of the 5 local nodes xi-2..xi+2
B_LOCAL = np.array([
    [1.0, 0, -1, 0, 0],
    [0, 1.0, -1, 0, 0],
    [0, 0, -1, 1.0, 0],
    [0, 0, -1, 0, 1.0],
])


class ModelKind(str, Enum):
    ATM = "ATM"
    QNL = "QNL"
    QNLL = "QNLL"


# Interface stencil reconstructions g = M @ (D_-2, D_-1, D_1, D_2).
IDENTITY = np.eye(4)
REFLECT_LEFT = np.array([      # site -Kbar: V(-D2, -D1, D1, D2)
    [0, 0, 0, -1.0],
    [0, 0, -1.0, 0],
    [0, 0, 1.0, 0],
    [0, 0, 0, 1.0],
])
CB_LEFT = np.array([           # site -Kbar+1: V(2 D-1, D-1, D1, D2)
    [0, 2.0, 0, 0],
    [0, 1.0, 0, 0],
    [0, 0, 1.0, 0],
    [0, 0, 0, 1.0],
])
CB_RIGHT = np.array([          # site Kbar-1: V(D-2, D-1, D1, 2 D1)
    [1.0, 0, 0, 0],
    [0, 1.0, 0, 0],
    [0, 0, 1.0, 0],
    [0, 0, 2.0, 0],
])
REFLECT_RIGHT = np.array([     # site Kbar: V(D-2, D-1, -D-1, -D-2)
    [1.0, 0, 0, 0],
    [0, 1.0, 0, 0],
    [0, -1.0, 0, 0],
    [-1.0, 0, 0, 0],
])
# The reflected outer sites carry half a site of energy; with full weight the
# stress in the outermost interface cell exceeds W'(F) by V_1 + V_2.
REFLECT_WEIGHT = 0.5


@dataclass(frozen=True)
class SiteGroup:
    """``count`` consecutive sites whose centres start at padded index ``start``."""

    start: int
    count: int
    M: np.ndarray
    weight: float

    def window(self, a: int) -> slice:
        s = self.start - 2 + a
        return slice(s, s + self.count)


@dataclass
class Assembly:
    """Index data for one (model, config, node set) triple."""

    model: ModelKind
    cfg: ProblemConfig
    nodes: np.ndarray
    groups: list[SiteGroup]
    nl_elems: list[slice]
    lin_elems: list[slice]
    h: np.ndarray
    cb: pot.CauchyBornCoeffs

    @property
    def n(self) -> int:
        return len(self.nodes)

    @classmethod
    def build(cls, model: ModelKind | str, cfg: ProblemConfig,
              nodes: np.ndarray | None = None) -> "Assembly":
        model = ModelKind(model)
        N, K, Kb, L = cfg.N, cfg.K, cfg.Kbar, cfg.L
        nodes = np.arange(-N, N + 1) if nodes is None else np.asarray(nodes, dtype=int)
        if nodes[0] != -N or nodes[-1] != N or np.any(np.diff(nodes) <= 0):
            raise DimensionError("nodes must increase strictly from -N to N")
        pos = {int(x): i + GHOST for i, x in enumerate(nodes)}

        def padded(xi: int) -> int:
            if xi not in pos:
                raise DimensionError(f"site {xi} is not a node")
            return pos[xi]

        eye_w = 1.0
        if model is ModelKind.ATM:
            if len(nodes) != 2 * N + 1:
                raise DimensionError("the atomistic model needs every lattice site")
            groups = [SiteGroup(GHOST - 1, 2 * N + 3, IDENTITY, eye_w)]
        else:
            lo, hi = padded(-Kb), padded(Kb)
            if hi - lo != 2 * Kb:
                raise DimensionError("all sites in [-Kbar, Kbar] must be nodes")
            groups = [
                SiteGroup(padded(-K), 2 * K + 1, IDENTITY, eye_w),
                SiteGroup(padded(-Kb), 1, REFLECT_LEFT, REFLECT_WEIGHT),
                SiteGroup(padded(-Kb + 1), 1, CB_LEFT, 1.0),
                SiteGroup(padded(Kb - 1), 1, CB_RIGHT, 1.0),
                SiteGroup(padded(Kb), 1, REFLECT_RIGHT, REFLECT_WEIGHT),
            ]

        nl_elems: list[slice] = []
        lin_elems: list[slice] = []
        if model is not ModelKind.ATM:
            iKb = padded(Kb) - GHOST
            iKbm = padded(-Kb) - GHOST
            nl_edge = L if model is ModelKind.QNLL else N
            iL = padded(nl_edge) - GHOST
            iLm = padded(-nl_edge) - GHOST
            # element j spans nodes j and j+1
            nl_elems = [slice(iLm, iKbm), slice(iKb, iL)]
            lin_elems = [slice(0, iLm), slice(iL, len(nodes) - 1)]
            nl_elems = [s for s in nl_elems if s.stop > s.start]
            lin_elems = [s for s in lin_elems if s.stop > s.start]

        return cls(model, cfg, nodes, groups, nl_elems, lin_elems,
                   np.diff(nodes).astype(float), pot.cauchy_born(cfg.F, cfg.eam))

    # -- helpers -----------------------------------------------------------
    def pad(self, u: np.ndarray, ghosts: np.ndarray | None = None) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.n,):
            raise DimensionError(f"expected {self.n} nodal values, got {u.shape}")
        up = np.zeros(self.n + 2 * GHOST)
        up[GHOST:-GHOST] = u
        if ghosts is not None:
            up[:GHOST] = ghosts[:GHOST]
            up[-GHOST:] = ghosts[GHOST:]
        return up

    def _increments(self, up: np.ndarray, grp: SiteGroup) -> np.ndarray:
        """Stencil minus its homogeneous value, i.e. differences of ``u``."""
        c = up[grp.window(2)]
        D = np.stack([up[grp.window(a)] - c for a in (0, 1, 3, 4)], axis=-1)
        return D @ grp.M.T

    def _stencils(self, up: np.ndarray, grp: SiteGroup) -> np.ndarray:
        # every reconstruction maps the homogeneous stencil to itself
        return self._increments(up, grp) + RHO * self.cfg.F

    def _elem_grad(self, up: np.ndarray, sl: slice) -> np.ndarray:
        lo = up[sl.start + GHOST:sl.stop + GHOST]
        hi = up[sl.start + GHOST + 1:sl.stop + GHOST + 1]
        return (hi - lo) / self.h[sl]

    # -- energy --------------------------------------------------------------
    def energy(self, u: np.ndarray, ghosts: np.ndarray | None = None) -> float:
        up = self.pad(u, ghosts)
        p = self.cfg.eam
        total = 0.0
        g0 = RHO * self.cfg.F
        for grp in self.groups:
            dg = self._increments(up, grp)
            total += grp.weight * float(np.sum(pot.v_site_increment(g0, dg, p)))
        F = self.cfg.F
        for sl in self.nl_elems:
            e = self._elem_grad(up, sl)
            total += float(np.sum(self.h[sl] * pot.w_increment(F, e, p)))
        cb = self.cb
        for sl in self.lin_elems:
            e = self._elem_grad(up, sl)
            total += float(np.sum(self.h[sl] * e * (cb.Wp_F + 0.5 * cb.Wpp_F * e)))
        return total

    # -- first variation -----------------------------------------------------
    def bond_forces(self, up: np.ndarray, grp: SiteGroup) -> np.ndarray:
        """``d(site energy)/d(D_rho y)`` per site, shape ``(count, 4)``."""
        g = self._stencils(up, grp)
        return grp.weight * (pot.v_grad(g, self.cfg.eam) @ grp.M)

    def elem_stress(self, up: np.ndarray, sl: slice, linear: bool) -> np.ndarray:
        e = self._elem_grad(up, sl)
        if linear:
            return self.cb.Wp_F + self.cb.Wpp_F * e
        return pot.dw_density(self.cfg.F + e, self.cfg.eam)

    def gradient(self, u: np.ndarray, ghosts: np.ndarray | None = None) -> np.ndarray:
        """Nodal gradient; the two clamped end nodes are set to zero."""
        up = self.pad(u, ghosts)
        gp = np.zeros_like(up)
        for grp in self.groups:
            dD = self.bond_forces(up, grp)
            for col, a in enumerate((0, 1, 3, 4)):
                gp[grp.window(a)] += dD[:, col]
            gp[grp.window(2)] -= dD.sum(axis=1)
        for sls, linear in ((self.nl_elems, False), (self.lin_elems, True)):
            for sl in sls:
                s = self.elem_stress(up, sl, linear)
                gp[sl.start + GHOST + 1:sl.stop + GHOST + 1] += s
                gp[sl.start + GHOST:sl.stop + GHOST] -= s
        g = gp[GHOST:-GHOST].copy()
        g[0] = g[-1] = 0.0
        return g

    # -- second variation ----------------------------------------------------
    def hessian(self, u: np.ndarray, ghosts: np.ndarray | None = None) -> BandedSym:
        """Banded Hessian over all nodes; clamped rows are kept for the caller to drop."""
        up = self.pad(u, ghosts)
        H = BandedSym.zeros(len(up), 4)
        ab = H.ab
        p = self.cfg.eam
        for grp in self.groups:
            g = self._stencils(up, grp)
            hD = grp.weight * np.einsum("ki,nkl,lj->nij", grp.M, pot.v_hess(g, p), grp.M)
            loc = np.einsum("ia,nij,jb->nab", B_LOCAL, hD, B_LOCAL)
            for a in range(5):
                for b in range(a, 5):
                    ab[4 - (b - a), grp.window(b)] += loc[:, a, b]
        F = self.cfg.F
        for sls, linear in ((self.nl_elems, False), (self.lin_elems, True)):
            for sl in sls:
                if linear:
                    k = np.full(sl.stop - sl.start, self.cb.Wpp_F)
                else:
                    k = pot.d2w_density(F + self._elem_grad(up, sl), p)
                k = k / self.h[sl]
                lo = slice(sl.start + GHOST, sl.stop + GHOST)
                hi = slice(sl.start + GHOST + 1, sl.stop + GHOST + 1)
                ab[4, lo] += k
                ab[4, hi] += k
                ab[3, hi] -= k
        return BandedSym(ab[:, GHOST:-GHOST].copy()).submatrix(0, self.n)

    # -- stress ----------------------------------------------------------------
    def stress(self, u: np.ndarray, ghosts: np.ndarray | None = None) -> np.ndarray:
        """Stress sampled on unit cells ``(xi-1, xi)``, ``xi = -N+1..N`` (lattice only)."""
        if self.n != 2 * self.cfg.N + 1:
            raise DimensionError("stress sampling needs the full lattice")
        up = self.pad(u, ghosts)
        # cp[j] is the cell whose right end is padded node j
        cp = np.zeros(len(up) + 2)
        for grp in self.groups:
            dD = self.bond_forces(up, grp)
            c = grp.window(2)
            # rho=-2 covers cells xi-1, xi; rho=-1 cell xi; rho=1 cell xi+1; rho=2 cells xi+1, xi+2
            for shift, col, sgn in ((-1, 0, -1), (0, 0, -1), (0, 1, -1),
                                    (1, 2, 1), (1, 3, 1), (2, 3, 1)):
                cp[c.start + shift:c.stop + shift] += sgn * dD[:, col]
        for sls, linear in ((self.nl_elems, False), (self.lin_elems, True)):
            for sl in sls:
                cp[sl.start + GHOST + 1:sl.stop + GHOST + 1] += self.elem_stress(up, sl, linear)
        return cp[GHOST + 1:GHOST + self.n]


# -- lattice front end ----------------------------------------------------------

def _split(cfg: ProblemConfig, y: LatticeField) -> tuple[np.ndarray, np.ndarray]:
    """Displacement on ``[-N, N]`` plus ghost values from a deformation field."""
    N = cfg.N
    if y.lo > -N or y.hi < N:
        raise DimensionError(f"field covers [{y.lo}, {y.hi}], need [-{N}, {N}]")
    sites = np.arange(-N, N + 1)
    u = y.at(sites) - cfg.F * sites
    gs = np.array([-N - 3, -N - 2, -N - 1, N + 1, N + 2, N + 3])
    ghosts = y.at(gs, np.nan) - cfg.F * gs
    ghosts = np.where(np.isnan(ghosts), 0.0, ghosts)
    return u, ghosts


_CACHE: dict[tuple, Assembly] = {}


def assembly(model: ModelKind | str, cfg: ProblemConfig) -> Assembly:
    key = (ModelKind(model), cfg)
    if key not in _CACHE:
        if len(_CACHE) > 64:
            _CACHE.clear()
        _CACHE[key] = Assembly.build(model, cfg)
    return _CACHE[key]


def energy(model: ModelKind | str, cfg: ProblemConfig, y: LatticeField) -> float:
    """Model energy, normalised so that the homogeneous state has energy zero."""
    u, ghosts = _split(cfg, y)
    return assembly(model, cfg).energy(u, ghosts)


def gradient(model: ModelKind | str, cfg: ProblemConfig, y: LatticeField) -> LatticeField:
    u, ghosts = _split(cfg, y)
    return LatticeField(-cfg.N, assembly(model, cfg).gradient(u, ghosts))


def hessian(model: ModelKind | str, cfg: ProblemConfig, y: LatticeField) -> BandedSym:
    """Hessian over sites ``-N..N``; free block is ``H.submatrix(1, 2N)``."""
    u, ghosts = _split(cfg, y)
    return assembly(model, cfg).hessian(u, ghosts)


@dataclass(frozen=True)
class StressField:
    """One stress sample per unit interval ``(xi-1, xi)``, ``xi = first..first+len-1``."""

    first: int
    samples: np.ndarray

    def cells(self) -> np.ndarray:
        return np.arange(self.first, self.first + len(self.samples))

    def midpoints(self) -> np.ndarray:
        return self.cells() - 0.5


def stress_field(model: ModelKind | str, cfg: ProblemConfig, y: LatticeField) -> StressField:
    u, ghosts = _split(cfg, y)
    return StressField(-cfg.N + 1, assembly(model, cfg).stress(u, ghosts))


def stress_error(kind: str, cfg: ProblemConfig, y: LatticeField) -> StressField:
    """``T_qnl = S_qnl - S_a`` or ``T_qnll = S_qnll - S_qnl``."""
    pairs = {"T_qnl": ("QNL", "ATM"), "T_qnll": ("QNLL", "QNL")}
    if kind not in pairs:
        raise ValueError(f"unknown stress error {kind!r}; expected one of {sorted(pairs)}")
    hi, lo = pairs[kind]
    a, b = stress_field(hi, cfg, y), stress_field(lo, cfg, y)
    return StressField(a.first, a.samples - b.samples)


# -- benchmark solution and load -------------------------------------------------

def exact_displacement(alpha: float, amplitude: float = 0.1) -> Callable[[np.ndarray], np.ndarray]:
    """``u(x) = amplitude * x * (1 + x^2)^(-alpha/2)``, decaying like ``|x|^(1-alpha)``.

    Floating inputs keep their precision; integer inputs are promoted to float.
    """
    def u(x):
        x = np.asarray(x)
        if not np.issubdtype(x.dtype, np.floating):
            x = x.astype(float)
        return amplitude * x * (1 + x * x) ** (-0.5 * alpha)
    return u


def external_force_at(exact_u: Callable, sites: np.ndarray, F: float = 1.0,
                      eam: pot.EamParams = pot.DEFAULT_EAM) -> np.ndarray:
    """Infinite-lattice atomistic force ``d E^a / d y(xi)`` at ``y = F x + exact_u``.

    Far from the core the force is many orders below the bond forces it is
    summed from, so stencils are formed from displacement differences and
    evaluated in extended precision.
    """
    ext = np.longdouble
    sites = np.asarray(sites, dtype=np.int64)
    off = np.arange(-4, 5)
    x = (sites[:, None] + off[None, :]).astype(ext)
    u = exact_u(x)
    nb = np.array([-2, -1, 1, 2])

    def dV(c):
        # bond forces of the site at local column c
        D = F * nb.astype(ext) + (u[:, c + nb] - u[:, [c]])
        return pot.v_grad(D, eam)

    # sites xi-2..xi+2 sit at columns 2..6; xi itself is column 4
    f = -dV(4).sum(axis=1)
    for col, rho_idx in ((2, 3), (3, 2), (5, 1), (6, 0)):
        # site xi-2 reaches xi via rho=+2 (index 3), xi-1 via rho=+1, etc.
        f += dV(col)[:, rho_idx]
    return f.astype(float)


def external_force_for(exact_u: Callable, cfg: ProblemConfig) -> LatticeField:
    sites = np.arange(-cfg.N, cfg.N + 1)
    return LatticeField(-cfg.N, external_force_at(exact_u, sites, cfg.F, cfg.eam))
