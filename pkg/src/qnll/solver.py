"""Damped Newton minimisation with banded Cholesky and stability diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field
import time
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .banded import BandedSym, laplacian, mesh_laplacian
from .coarse import Mesh, MeshField, coarse_assembly, trapezoid_weights
from .lattice import DimensionError, LatticeField, ProblemConfig
from .models import Assembly, ModelKind, assembly

# accept a non-decreasing step when the objective moved by no more than this
# multiple of machine epsilon times its size (energy differences drown in round-off)
ROUNDOFF = 64.0


@dataclass(frozen=True)
class SolveOptions:
    grad_tol: float = 1e-10
    max_iter: int = 50
    shrink: float = 0.5
    armijo: float = 1e-4
    max_backtracks: int = 40
    initial_guess: np.ndarray | None = None  # displacement on the free DoFs
    compute_min_eig: bool = False

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise ValueError(f"grad_tol must be positive, got {self.grad_tol}")
        if not 0 < self.shrink < 1:
            raise ValueError(f"shrink must lie in (0, 1), got {self.shrink}")
        if self.max_iter < 0:
            raise ValueError("max_iter must be non-negative")


@dataclass
class SolveReport:
    iterations: int = 0
    final_grad_norm: float = float("inf")
    final_energy: float = float("nan")
    wall_time: float = 0.0
    converged: bool = False
    min_hessian_eigenvalue: float | None = None
    flags: list[str] = field(default_factory=list)
    history: list[float] = field(default_factory=list)


def _descent_direction(H: BandedSym, r: np.ndarray, flags: list[str]) -> np.ndarray:
    try:
        d = H.solve(-r)
        if np.all(np.isfinite(d)) and d @ r < 0:
            return d
    except np.linalg.LinAlgError:
        pass
    scale = max(float(np.max(np.abs(H.ab[-1]))), 1.0)
    for tau in scale * 10.0 ** np.arange(-8, 1):
        try:
            d = H.shifted(tau).solve(-r)
        except np.linalg.LinAlgError:
            continue
        if np.all(np.isfinite(d)) and d @ r < 0:
            flags.append("shifted")
            return d
    flags.append("gradient_step")
    return -r / scale


def newton(objective: Callable[[np.ndarray], float],
           gradient: Callable[[np.ndarray], np.ndarray],
           hessian: Callable[[np.ndarray], BandedSym],
           x0: np.ndarray,
           opts: SolveOptions = SolveOptions()) -> tuple[np.ndarray, SolveReport]:
    """Minimise ``objective`` from ``x0`` with backtracking Newton steps."""
    rep = SolveReport()
    t0 = time.perf_counter()
    x = np.array(x0, dtype=float)
    phi = objective(x)
    r = gradient(x)
    rep.history.append(phi)
    while True:
        gnorm = float(np.max(np.abs(r))) if r.size else 0.0
        if gnorm <= opts.grad_tol or rep.iterations >= opts.max_iter:
            break
        d = _descent_direction(hessian(x), r, rep.flags)
        slope = float(d @ r)
        resolution = ROUNDOFF * np.finfo(float).eps * max(1.0, abs(phi))
        accepted = False
        if -slope > resolution:
            t = 1.0
            for _ in range(opts.max_backtracks):
                x_new = x + t * d
                phi_new = objective(x_new)
                if phi_new <= phi + opts.armijo * t * slope:
                    accepted = True
                    break
                t *= opts.shrink
            if accepted:
                x, phi = x_new, phi_new
                r = gradient(x)
        if not accepted:
            # the predicted decrease is at round-off level, so the objective
            # cannot rank the step; take it if the residual shrinks and the
            # objective does not measurably increase
            x_new = x + d
            phi_new = objective(x_new)
            r_new = gradient(x_new)
            if phi_new <= phi + resolution and np.max(np.abs(r_new)) < gnorm:
                rep.flags.append("roundoff_step")
                x, phi, r = x_new, phi_new, r_new
            else:
                rep.flags.append("line_search_failed")
                break
        rep.iterations += 1
        rep.history.append(phi)
    rep.wall_time = time.perf_counter() - t0
    rep.final_grad_norm = float(np.max(np.abs(r))) if r.size else 0.0
    rep.final_energy = phi
    rep.converged = rep.final_grad_norm <= opts.grad_tol
    return x, rep


# -- model front end ---------------------------------------------------------------

def _problem(model, cfg: ProblemConfig, mesh: Mesh | None, f) -> tuple[Assembly, np.ndarray, np.ndarray]:
    """Assembly, load vector on all nodes, and the nodes themselves."""
    if mesh is None:
        asm = assembly(model, cfg)
        nodes = asm.nodes
        weights = np.ones(len(nodes))
    else:
        asm = coarse_assembly(model, cfg, mesh)
        nodes = mesh.nodes
        weights = trapezoid_weights(mesh)
    if isinstance(f, LatticeField):
        if f.lo > nodes[0] or f.hi < nodes[-1]:
            raise DimensionError(f"load covers [{f.lo}, {f.hi}], need [{nodes[0]}, {nodes[-1]}]")
        fv = np.asarray(f.at(nodes), dtype=float)
    elif isinstance(f, MeshField):
        fv = np.asarray(f.values, dtype=float)
    else:
        fv = np.zeros(len(nodes)) if f is None else np.asarray(f, dtype=float)
    if fv.shape != (len(nodes),):
        raise DimensionError(f"load has {fv.shape} values for {len(nodes)} nodes")
    return asm, weights * fv, nodes


def minimize(model: ModelKind | str, cfg: ProblemConfig, mesh: Mesh | None,
             f, opts: SolveOptions = SolveOptions()):
    """Minimise ``E(y) - <f, y>`` over clamped displacements.

    Without a mesh the unknowns are all lattice sites and the load pairs as a
    plain sum; with a mesh they are the nodal values and the load uses the
    trapezoidal pairing. Returns the deformation (a ``LatticeField`` or a
    ``MeshField``) and a :class:`SolveReport`.
    """
    asm, b, nodes = _problem(model, cfg, mesh, f)
    n = len(nodes)
    bf = b[1:-1]

    def full(z):
        u = np.zeros(n)
        u[1:-1] = z
        return u

    def objective(z):
        return asm.energy(full(z)) - float(bf @ z)

    def grad(z):
        return asm.gradient(full(z))[1:-1] - bf

    def hess(z):
        return asm.hessian(full(z)).submatrix(1, n - 1)

    z0 = np.zeros(n - 2) if opts.initial_guess is None else np.asarray(opts.initial_guess, float)
    if z0.shape != (n - 2,):
        raise DimensionError(f"initial guess has {z0.shape} values for {n - 2} free DoFs")
    z, rep = newton(objective, grad, hess, z0, opts)
    if opts.compute_min_eig:
        A = laplacian(n - 2) if mesh is None else mesh_laplacian(mesh.h)
        rep.min_hessian_eigenvalue = min_eigenvalue(hess(z), A)
    y = cfg.F * nodes + full(z)
    if mesh is None:
        return LatticeField(int(nodes[0]), y), rep
    return MeshField(y), rep


# -- spectral diagnostics ------------------------------------------------------------

DENSE_LIMIT = 1500


def _to_sparse(H: BandedSym) -> scipy.sparse.csc_matrix:
    u = H.u
    diags = [H.ab[u - k, k:] for k in range(u + 1)]
    lower = scipy.sparse.diags(diags, list(range(0, -u - 1, -1)), shape=(H.n, H.n))
    upper = scipy.sparse.diags(diags[1:], list(range(1, u + 1)), shape=(H.n, H.n))
    return (lower + upper).tocsc()


def min_eigenvalue(H: BandedSym, A: BandedSym | None = None) -> float:
    """Smallest eigenvalue of the pencil ``(H, A)``; ``A`` defaults to the Laplacian.

    Small problems use a dense symmetric-definite solver. Large ones use
    shift-invert Lanczos about zero, which converges to the eigenvalue of
    smallest magnitude, so they require ``H`` positive definite; this is
    checked with a banded Cholesky factorisation first.
    """
    A = laplacian(H.n) if A is None else A
    if A.n != H.n:
        raise DimensionError("H and A differ in size")
    if H.n <= DENSE_LIMIT:
        w = scipy.linalg.eigh(H.to_dense(), A.to_dense(), eigvals_only=True,
                              subset_by_index=[0, 0])
        return float(w[0])
    H.solve(np.ones(H.n))  # raises LinAlgError if not positive definite
    Hs, As = _to_sparse(H), _to_sparse(A)
    try:
        w, v = scipy.sparse.linalg.eigsh(Hs, k=1, M=As, sigma=0.0, which="LM", tol=1e-12)
    except scipy.sparse.linalg.ArpackNoConvergence as exc:
        raise RuntimeError(f"eigenvalue iteration stagnated: {exc}") from exc
    x = v[:, 0]
    lam = float(w[0])
    res = np.linalg.norm(Hs @ x - lam * (As @ x)) / max(np.linalg.norm(Hs @ x), 1e-300)
    if res > 1e-6:
        raise RuntimeError(f"eigenvalue iteration stagnated, relative residual {res:.2e}")
    return lam
