"""Graded P1 meshes with lattice-site vertices, interpolation and quadrature."""

from __future__ import annotations

from dataclasses import dataclass
import math
from pathlib import Path

import numpy as np

from .balance import n_from_kbar, n_from_l
from .banded import BandedSym
from .lattice import ConfigError, DimensionError, LatticeField, ProblemConfig, R_CUT
from .models import Assembly, ModelKind


@dataclass(frozen=True)
class Mesh:
    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=int)
        object.__setattr__(self, "nodes", nodes)
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("mesh nodes must be strictly increasing")

    @property
    def N(self) -> int:
        return int(self.nodes[-1])

    @property
    def h(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def elements(self) -> np.ndarray:
        return np.stack([self.nodes[:-1], self.nodes[1:]], axis=1)

    @property
    def dof(self) -> int:
        """Free nodes (the two end nodes are clamped)."""
        return len(self.nodes) - 2

    def __len__(self) -> int:
        return len(self.nodes)

    def __hash__(self):
        return hash(self.nodes.tobytes())

    def __eq__(self, other):
        return isinstance(other, Mesh) and np.array_equal(self.nodes, other.nodes)


@dataclass(frozen=True)
class MeshField:
    values: np.ndarray


def unit_mesh(N: int) -> Mesh:
    return Mesh(np.arange(-N, N + 1))


def domain_size(Kbar: int, alpha: float) -> int:
    """Computational half-width ``N`` from the atomistic half-width."""
    if alpha <= 0.5:
        raise ConfigError(f"alpha must exceed 1/2, got {alpha}")
    if alpha >= 1:
        return n_from_kbar(Kbar, alpha)
    return n_from_l(Kbar, alpha)


def mesh_size(x, L: int, alpha: float):
    """Target element size ``(|x|/L)^(2(alpha+1)/3)``."""
    return (np.abs(x) / L) ** (2.0 * (alpha + 1.0) / 3.0)


def build_mesh(K: int, L: int, alpha: float, N: int | None = None) -> tuple[Mesh, int]:
    """Graded mesh: every atom up to ``Kbar``, then steps of ``floor(h~(n))``.

    ``N`` defaults to the value derived from ``Kbar`` and ``alpha``; pass it
    explicitly to grade a mesh onto a domain chosen elsewhere.
    Steps are at least one lattice spacing, which also keeps every node a site.
    """
    Kbar = K + R_CUT
    if L < Kbar:
        raise ConfigError(f"L < Kbar (L={L}, Kbar={Kbar})")
    if N is None:
        N = domain_size(Kbar, alpha)
    if L > N:
        raise ConfigError(f"L > N (L={L}, N={N})")
    pos = list(range(Kbar + 1))
    n = Kbar
    while n < L:
        n = min(L, n + max(1, math.floor(mesh_size(n, L, alpha))))
        pos.append(n)
    while n < N:
        n = min(N, n + max(1, math.floor(mesh_size(n, L, alpha))))
        pos.append(n)
    pos = np.array(pos)
    return Mesh(np.concatenate([-pos[:0:-1], pos])), int(N)


def interpolate(mesh: Mesh, u: LatticeField) -> MeshField:
    """Nodal values of a lattice field (zero outside its stored range)."""
    return MeshField(np.asarray(u.at(mesh.nodes), dtype=float))


def prolong(mesh: Mesh, u_h: MeshField) -> LatticeField:
    """Evaluate the piecewise affine interpolant at every site of ``[-N, N]``."""
    sites = np.arange(mesh.nodes[0], mesh.nodes[-1] + 1)
    return LatticeField(int(mesh.nodes[0]), np.interp(sites, mesh.nodes, u_h.values))


def trapezoid_weights(mesh: Mesh) -> np.ndarray:
    h = mesh.h.astype(float)
    w = np.zeros(len(mesh.nodes))
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def trapezoid_pair(mesh: Mesh, f: MeshField, g: MeshField) -> float:
    """``<f, g>_h``: trapezoidal rule for the product over every element."""
    return float(np.sum(trapezoid_weights(mesh) * f.values * g.values))


# -- coarse-grained model assembly ------------------------------------------

def _check(cfg: ProblemConfig, mesh: Mesh):
    if mesh.N != cfg.N or mesh.nodes[0] != -cfg.N:
        raise DimensionError(f"mesh spans [{mesh.nodes[0]}, {mesh.N}], config has N={cfg.N}")


_CACHE: dict[tuple, Assembly] = {}


def coarse_assembly(model: ModelKind | str, cfg: ProblemConfig, mesh: Mesh) -> Assembly:
    model = ModelKind(model)
    if model is ModelKind.ATM:
        raise ValueError("coarse graining applies to QNL and QNLL only")
    _check(cfg, mesh)
    key = (model, cfg, mesh)
    if key not in _CACHE:
        if len(_CACHE) > 32:
            _CACHE.clear()
        _CACHE[key] = Assembly.build(model, cfg, mesh.nodes)
    return _CACHE[key]


def _u(cfg: ProblemConfig, mesh: Mesh, y_h: MeshField) -> np.ndarray:
    if len(y_h.values) != len(mesh.nodes):
        raise DimensionError("mesh field has the wrong number of nodes")
    return y_h.values - cfg.F * mesh.nodes


def coarse_energy(model, cfg: ProblemConfig, mesh: Mesh, y_h: MeshField) -> float:
    """Internal energy of a P1 deformation (load excluded)."""
    return coarse_assembly(model, cfg, mesh).energy(_u(cfg, mesh, y_h))


def coarse_gradient(model, cfg: ProblemConfig, mesh: Mesh, y_h: MeshField) -> MeshField:
    return MeshField(coarse_assembly(model, cfg, mesh).gradient(_u(cfg, mesh, y_h)))


def coarse_hessian(model, cfg: ProblemConfig, mesh: Mesh, y_h: MeshField) -> BandedSym:
    return coarse_assembly(model, cfg, mesh).hessian(_u(cfg, mesh, y_h))


def nl_fraction(mesh: Mesh, Kbar: int, L: int) -> float:
    """Share of continuum elements that lie in the nonlinear region."""
    a, b = mesh.nodes[:-1], mesh.nodes[1:]
    cont = (a >= Kbar) | (b <= -Kbar)
    nl = cont & (b <= L) & (a >= -L)
    return float(nl.sum() / max(cont.sum(), 1))


def decaying_curvature(alpha: float):
    """``|u''(x)| = (1 + x^2)^(-(alpha+1)/2)``: second derivative of a decaying tail."""
    def d2u(x):
        x = np.asarray(x, dtype=float)
        return (1.0 + x * x) ** (-0.5 * (alpha + 1.0))
    return d2u


def interpolation_error_proxy(mesh: Mesh, d2u, Kbar: int, samples: int = 5) -> float:
    """``||h u''||`` over the continuum elements: ``sqrt(sum h^3 max_T |u''|^2)``."""
    a, b = mesh.nodes[:-1], mesh.nodes[1:]
    cont = (a >= Kbar) | (b <= -Kbar)
    a, b = a[cont].astype(float), b[cont].astype(float)
    t = np.linspace(0.0, 1.0, samples)
    peak = np.max(np.abs(d2u(a[:, None] + t[None, :] * (b - a)[:, None])), axis=1)
    h = b - a
    return float(np.sqrt(np.sum(h**3 * peak**2)))


# -- text dump ---------------------------------------------------------------

def write_mesh(path: str | Path, mesh: Mesh, K: int, L: int, alpha: float) -> None:
    lines = [f"# {K} {L} {mesh.N} {alpha}"] + [str(int(x)) for x in mesh.nodes]
    Path(path).write_text("\n".join(lines) + "\n")


def read_mesh(path: str | Path) -> tuple[Mesh, dict]:
    text = Path(path).read_text().splitlines()
    head = text[0].lstrip("#").split()
    meta = {"K": int(head[0]), "L": int(head[1]), "N": int(head[2]), "alpha": float(head[3])}
    nodes = np.array([int(s) for s in text[1:] if s.strip()])
    return Mesh(nodes), meta
