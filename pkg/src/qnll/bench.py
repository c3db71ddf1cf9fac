"""Convergence and timing studies against the analytic benchmark solution."""

from __future__ import annotations

from dataclasses import dataclass, fields
import csv
from functools import lru_cache
from pathlib import Path
import statistics
from typing import Iterable

import numpy as np
from scipy.integrate import quad

from . import models
from .balance import BalancePlan, plan
from .banded import laplacian
from .coarse import Mesh, MeshField, build_mesh, nl_fraction, unit_mesh
from .lattice import LatticeField, ProblemConfig, R_CUT, homogeneous
from .models import ModelKind
from .potential import EamParams
from .solver import SolveOptions, SolveReport, min_eigenvalue, minimize

CSV_HEADER = ["model", "K", "Kbar", "L", "N", "dof", "err_gradL2", "wall_time_s", "nl_fraction"]
DIFF_HEADER = ["K", "Kbar", "L", "N", "dof", "diff_gradL2", "err_gradL2_QNL", "converged"]
AMPLITUDE = 0.1


@dataclass
class StudyRow:
    model: str
    K: int
    Kbar: int
    L: int
    N: int
    dof: int
    err_gradL2: float
    wall_time_s: float
    nl_fraction: float

    def as_csv(self) -> list:
        return [getattr(self, f.name) for f in fields(self)]


@dataclass
class ConvergenceResult:
    rows: list[StudyRow]
    # (K, Kbar, L, N, dof, ||grad(y_QNL - y_QNLL)||, err QNL, both converged)
    differences: list[tuple]
    flagged: list[str]

    def errors(self, model: str) -> np.ndarray:
        return np.array([r.err_gradL2 for r in self.rows if r.model == model])

    def column(self, model: str, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows if r.model == model], dtype=float)


# -- error metric ---------------------------------------------------------------

@lru_cache(maxsize=32)
def exact_energy_norm_sq(alpha: float, amplitude: float = AMPLITUDE) -> float:
    """``sum over all cells of (u(xi) - u(xi-1))^2`` for the benchmark displacement."""
    ue = models.exact_displacement(alpha, amplitude)
    M = 1_000_000
    xs = np.arange(0, M + 1, dtype=float)
    d = np.diff(ue(xs))
    head = float(np.sum(d * d))

    def du2(x):
        # derivative of amplitude * x (1 + x^2)^(-alpha/2)
        q = 1.0 + x * x
        return (amplitude * q ** (-0.5 * alpha - 1.0) * (1.0 + (1.0 - alpha) * x * x)) ** 2

    tail, _ = quad(du2, M + 0.5, np.inf, limit=200)
    # the displacement is odd, so the cell differences are even
    return 2.0 * (head + tail)


def error_grad_l2(mesh: Mesh, y_h: MeshField, alpha: float, F: float = 1.0,
                  amplitude: float = AMPLITUDE) -> float:
    """``||grad(y_exact - y_h)||`` over the whole lattice, ``y_h`` prolonged as P1.

    Outside ``[-N, N]`` the discrete solution is the homogeneous state. On each
    element the prolonged gradient is a constant ``g``, so the squared error
    there equals ``h g^2 - 2 g (u(b) - u(a)) + sum of squared exact cell differences``;
    summing the last term over all cells gives the exact norm, which is
    precomputed once.
    """
    ue = models.exact_displacement(alpha, amplitude)
    u_h = y_h.values - F * mesh.nodes
    h = mesh.h.astype(float)
    g = np.diff(u_h) / h
    du = np.diff(ue(mesh.nodes.astype(float)))
    sq = exact_energy_norm_sq(alpha, amplitude) + float(np.sum(h * g * g - 2.0 * g * du))
    return float(np.sqrt(max(sq, 0.0)))


def difference_grad_l2(mesh: Mesh, y1: MeshField, y2: MeshField) -> float:
    g = np.diff(y1.values - y2.values) / mesh.h
    return float(np.sqrt(np.sum(mesh.h * g * g)))


def as_mesh_field(y: LatticeField | MeshField) -> MeshField:
    return y if isinstance(y, MeshField) else MeshField(np.asarray(y.values, float))


# -- single solves ---------------------------------------------------------------

def benchmark_load(mesh: Mesh, cfg: ProblemConfig, amplitude: float = AMPLITUDE) -> MeshField:
    ue = models.exact_displacement(cfg.alpha, amplitude)
    return MeshField(models.external_force_at(ue, mesh.nodes, cfg.F, cfg.eam))


def solve_benchmark(model: str, cfg: ProblemConfig, mesh: Mesh | None,
                    opts: SolveOptions = SolveOptions(),
                    amplitude: float = AMPLITUDE) -> tuple[MeshField, SolveReport, Mesh]:
    """Solve the benchmark problem; a ``None`` mesh means the full lattice."""
    m = unit_mesh(cfg.N) if mesh is None else mesh
    f = benchmark_load(m, cfg, amplitude)
    y, rep = minimize(model, cfg, mesh, f if mesh is not None else
                      LatticeField(-cfg.N, f.values), opts)
    return as_mesh_field(y), rep, m


def study_mesh(p: BalancePlan, scheme: str = "balanced") -> tuple[Mesh, int]:
    """Mesh for one coarse-grained study row.

    Both schemes keep the planned ``Kbar`` and ``N``. ``balanced`` grades from
    the planned ``L``; ``unbalanced`` collapses the nonlinear region to
    ``L = Kbar`` and grades from there.
    """
    if scheme == "balanced":
        return build_mesh(p.K, p.L, p.alpha, N=p.N)
    if scheme == "unbalanced":
        return build_mesh(p.K, p.Kbar, p.alpha, N=p.N)
    raise ValueError(f"unknown scheme {scheme!r}")


def run_convergence(alpha: float, k_list: Iterable[int], regime: str,
                    models_: Iterable[str] = ("QNL", "QNLL"), scheme: str = "balanced",
                    eam: EamParams | None = None,
                    opts: SolveOptions = SolveOptions(),
                    amplitude: float = AMPLITUDE) -> ConvergenceResult:
    eam = eam or EamParams()
    models_ = [ModelKind(m).value for m in models_]
    if regime == "coarse" and "ATM" in models_:
        raise ValueError("the atomistic model has no coarse-grained form")
    rows, diffs, flagged = [], [], []
    for K in k_list:
        p = plan(regime, K, alpha)
        if regime == "coarse":
            mesh, N = study_mesh(p, scheme)
            L = p.L if scheme == "balanced" else p.Kbar
        else:
            mesh, N, L = None, p.N, p.L if scheme == "balanced" else p.Kbar
        cfg = ProblemConfig(N, K, L, 1.0, float(alpha), eam)
        sols = {}
        for model in models_:
            y, rep, m = solve_benchmark(model, cfg, mesh, opts, amplitude)
            if not rep.converged:
                flagged.append(f"{model} K={K}: not converged, |grad|={rep.final_grad_norm:.3e}")
            sols[model] = (y, rep)
            frac = nl_fraction(m, cfg.Kbar, L if model == "QNLL" else N)
            rows.append(StudyRow(model, K, cfg.Kbar, L, N, m.dof,
                                 error_grad_l2(m, y, alpha, cfg.F, amplitude),
                                 rep.wall_time, frac))
        if "QNL" in sols and "QNLL" in sols:
            d = difference_grad_l2(m, sols["QNL"][0], sols["QNLL"][0])
            err = error_grad_l2(m, sols["QNL"][0], alpha, cfg.F, amplitude)
            ok = sols["QNL"][1].converged and sols["QNLL"][1].converged
            diffs.append((K, cfg.Kbar, L, N, m.dof, d, err, ok))
    return ConvergenceResult(rows, diffs, flagged)


def fit_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


# -- timing -------------------------------------------------------------------------

@dataclass(frozen=True)
class TimingSetup:
    K: int = 4
    L_mesh: int = 30000
    N: int = 300000
    alpha: float = 1.2
    repeats: int = 5


PAPER_SCALE_TIMING = TimingSetup(L_mesh=100000, N=1000000)


def l_for_fraction(mesh: Mesh, Kbar: int, fraction: float) -> tuple[int, float]:
    """Node ``L`` whose nonlinear share of continuum elements is closest to ``fraction``."""
    pos = mesh.nodes[mesh.nodes >= Kbar]
    n_cont = len(pos) - 1
    k = int(np.clip(round(fraction * n_cont), 0, n_cont))
    L = int(pos[k])
    return L, k / n_cont


def run_timing(setup: TimingSetup, fractions: Iterable[float],
               eam: EamParams | None = None,
               opts: SolveOptions = SolveOptions()) -> list[dict]:
    """Median solve time of QNLL per nonlinear fraction on one fixed mesh.

    The last row is QNL, which every ratio is normalised by; a requested
    fraction of 1 is that row. Repetitions are interleaved across rows so
    slow drifts in machine speed affect every row alike.
    """
    eam = eam or EamParams()
    Kbar = setup.K + R_CUT
    mesh, N = build_mesh(setup.K, setup.L_mesh, setup.alpha, N=setup.N)
    runs = []
    for frac in fractions:
        if not 0 < frac <= 1:
            raise ValueError(f"fractions must lie in (0, 1], got {frac}")
        if frac < 1:
            L, actual = l_for_fraction(mesh, Kbar, frac)
            runs.append(("QNLL", frac, max(L, Kbar), actual))
    runs.append(("QNL", 1.0, N, 1.0))
    problems = []
    for model, frac, L, actual in runs:
        cfg = ProblemConfig(N, setup.K, L, 1.0, setup.alpha, eam)
        f = benchmark_load(mesh, cfg)
        minimize(model, cfg, mesh, f, opts)  # build and cache the assembly
        problems.append((model, cfg, f))
    times = [[] for _ in runs]
    reports = [None] * len(runs)
    for _ in range(setup.repeats):
        for i, (model, cfg, f) in enumerate(problems):
            _, reports[i] = minimize(model, cfg, mesh, f, opts)
            times[i].append(reports[i].wall_time)
    out = []
    for (model, frac, L, actual), ts, rep in zip(runs, times, reports):
        out.append(dict(model=model, requested_fraction=frac, nl_fraction=actual, L=L, N=N,
                        dof=mesh.dof, wall_time_s=statistics.median(ts),
                        iterations=rep.iterations, converged=rep.converged))
    t_qnl = out[-1]["wall_time_s"]
    for r in out:
        r["ratio"] = r["wall_time_s"] / t_qnl
    return out


# -- diagnostics ----------------------------------------------------------------------

def diagnostics(cfg: ProblemConfig, model_list: Iterable[str] = ("ATM", "QNL", "QNLL"),
                seed: int = 0) -> dict:
    """Homogeneous-state consistency checks for one configuration."""
    yF = homogeneous(cfg)
    out: dict = {}
    n = cfg.n_sites
    for m in model_list:
        g = models.gradient(m, cfg, yF).values
        out[f"ghost_force_{m}"] = float(np.max(np.abs(g[1:-1])))
        H = models.hessian(m, cfg, yF).submatrix(1, n - 1)
        out[f"min_eig_{m}"] = min_eigenvalue(H, laplacian(n - 2))
    HQ = models.hessian("QNL", cfg, yF).to_dense()
    HL = models.hessian("QNLL", cfg, yF).to_dense()
    out["hessian_max_dev"] = float(np.max(np.abs(HQ - HL)))
    rng = np.random.default_rng(seed)
    u = np.zeros(n)
    u[1:-1] = 0.05 * rng.standard_normal(n - 2)
    y = LatticeField(-cfg.N, cfg.F * np.arange(-cfg.N, cfg.N + 1) + u)
    t1 = models.stress_error("T_qnl", cfg, y)
    t2 = models.stress_error("T_qnll", cfg, y)
    lo, hi = cfg.regions.omega_a_interior
    mid = t1.midpoints()
    core = (mid > lo) & (mid < hi)
    lin = np.abs(t2.cells() - 0.5) > cfg.L
    out["T_qnl_zero_in_core"] = bool(np.all(t1.samples[core] == 0.0))
    out["T_qnll_zero_outside_linear"] = bool(np.all(t2.samples[~lin] == 0.0))
    return out


# -- output -------------------------------------------------------------------------

def write_rows(path: str | Path, rows: list[StudyRow]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow(r.as_csv())


def read_rows(path: str | Path) -> list[StudyRow]:
    with open(path) as fh:
        rd = csv.DictReader(fh)
        if rd.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected header {rd.fieldnames}")
        types = {f.name: f.type for f in fields(StudyRow)}
        conv = {"str": str, "int": int, "float": float}
        return [StudyRow(**{k: conv[types[k]](v) for k, v in rec.items()}) for rec in rd]


def write_differences(path: str | Path, diffs: list[tuple]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DIFF_HEADER)
        w.writerows(diffs)


def write_dicts(path: str | Path, recs: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(recs[0]))
        w.writeheader()
        w.writerows(recs)
