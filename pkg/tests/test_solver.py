import numpy as np
import pytest
import scipy.linalg

from qnll import models
from qnll.banded import BandedSym, laplacian
from qnll import solver
from qnll.bench import benchmark_load, error_grad_l2, solve_benchmark
from qnll.coarse import build_mesh, coarse_gradient, trapezoid_weights, unit_mesh
from qnll.lattice import DimensionError, LatticeField, homogeneous, make_config
from qnll.solver import ROUNDOFF, SolveOptions, min_eigenvalue, minimize, newton


def quadratic(A, b):
    H = BandedSym.from_dense(A)
    return (lambda x: 0.5 * x @ A @ x - b @ x,
            lambda x: A @ x - b,
            lambda x: H)


def test_zero_load_needs_no_iterations():
    cfg = make_config(20, 3, 8)
    y, rep = minimize("QNLL", cfg, None, None)
    assert rep.iterations == 0 and rep.converged
    np.testing.assert_array_equal(y.values, homogeneous(cfg).values)


def test_quadratic_objective_converges_in_one_step(rng):
    n = 12
    A = laplacian(n).to_dense() + np.diag(rng.uniform(0.1, 1.0, n))
    b = rng.standard_normal(n)
    x, rep = newton(*quadratic(A, b), np.zeros(n))
    assert rep.iterations == 1 and rep.converged
    np.testing.assert_allclose(x, np.linalg.solve(A, b), rtol=1e-12)


@pytest.mark.parametrize("model", ["ATM", "QNL", "QNLL"])
def test_lattice_solve_is_close_to_the_exact_solution(model):
    cfg = make_config(64, 4, 16, alpha=1.2)
    y, rep, mesh = solve_benchmark(model, cfg, None)
    assert rep.converged
    assert rep.final_grad_norm <= 1e-10
    # what remains is the far-field truncation at N = 64
    assert error_grad_l2(mesh, y, 1.2) < 0.1


def test_energy_history_decreases_within_roundoff():
    cfg = make_config(200, 4, 20, alpha=1.0)
    mesh, _ = build_mesh(4, 20, 1.0, N=200)
    _, rep, _ = solve_benchmark("QNLL", cfg, mesh)
    h = np.array(rep.history)
    tol = ROUNDOFF * np.finfo(float).eps * np.maximum(1.0, np.abs(h[:-1]))
    assert np.all(np.diff(h) <= tol)


def test_returned_state_certifies_its_residual():
    cfg = make_config(150, 4, 16, alpha=1.2)
    mesh, _ = build_mesh(4, 16, 1.2, N=150)
    f = benchmark_load(mesh, cfg)
    y, rep = minimize("QNLL", cfg, mesh, f)
    r = coarse_gradient("QNLL", cfg, mesh, y).values - trapezoid_weights(mesh) * f.values
    assert np.max(np.abs(r[1:-1])) == pytest.approx(rep.final_grad_norm, rel=1e-6, abs=1e-14)
    assert rep.final_grad_norm <= 1e-10


def test_solves_are_deterministic():
    cfg = make_config(40, 3, 10, alpha=0.8)
    a, ra, _ = solve_benchmark("QNL", cfg, None)
    b, rb, _ = solve_benchmark("QNL", cfg, None)
    np.testing.assert_array_equal(a.values, b.values)
    assert ra.iterations == rb.iterations


def test_initial_guess_at_the_solution_returns_immediately():
    cfg = make_config(40, 3, 10)
    ue = models.exact_displacement(cfg.alpha)
    f = models.external_force_for(ue, cfg)
    y, _ = minimize("QNLL", cfg, None, f)
    guess = y.values[1:-1] - cfg.F * np.arange(-39, 40)
    _, rep = minimize("QNLL", cfg, None, f, SolveOptions(initial_guess=guess))
    assert rep.iterations == 0


def test_options_are_validated():
    with pytest.raises(ValueError):
        SolveOptions(grad_tol=0)
    with pytest.raises(ValueError):
        SolveOptions(shrink=1.5)
    with pytest.raises(ValueError):
        SolveOptions(max_iter=-1)
    cfg = make_config(10, 2, 5)
    with pytest.raises(DimensionError):
        minimize("QNL", cfg, None, np.zeros(3))
    with pytest.raises(DimensionError):
        minimize("QNL", cfg, None, LatticeField(-5, np.zeros(11)))
    with pytest.raises(DimensionError):
        minimize("QNL", cfg, None, None, SolveOptions(initial_guess=np.zeros(4)))


def test_iteration_cap_is_reported():
    cfg = make_config(40, 3, 10)
    f = models.external_force_for(models.exact_displacement(1.2), cfg)
    _, rep = minimize("ATM", cfg, None, f, SolveOptions(max_iter=1))
    assert rep.iterations == 1 and not rep.converged


def test_indefinite_hessian_falls_back_and_is_flagged():
    # f(x) = x^4/4 - x^2/2 has an indefinite Hessian at the origin
    obj = lambda x: float(np.sum(0.25 * x**4 - 0.5 * x**2 - 0.1 * x))  # noqa: E731
    grad = lambda x: x**3 - x - 0.1  # noqa: E731
    hess = lambda x: BandedSym.from_dense(np.diag(3 * x**2 - 1))  # noqa: E731
    x, rep = newton(obj, grad, hess, np.zeros(3))
    assert rep.converged
    assert "shifted" in rep.flags or "gradient_step" in rep.flags
    assert np.all(3 * x**2 - 1 > 0)


# -- spectral diagnostics ---------------------------------------------------------------

def test_laplacian_pencil_has_unit_eigenvalue():
    assert min_eigenvalue(laplacian(30)) == pytest.approx(1.0, rel=1e-12)


def test_min_eigenvalue_against_dense_solver(rng):
    A = rng.standard_normal((3, 3))
    H = BandedSym.from_dense(A @ A.T + 3 * np.eye(3))
    expect = scipy.linalg.eigh(H.to_dense(), laplacian(3).to_dense(), eigvals_only=True)[0]
    assert min_eigenvalue(H) == pytest.approx(expect, rel=1e-12)


def test_sparse_path_agrees_with_dense(monkeypatch):
    cfg = make_config(120, 4, 30)
    y = LatticeField(-120, cfg.F * np.arange(-120, 121) + 0.02 * np.sin(np.arange(241) / 9.0))
    y.values[0], y.values[-1] = -120, 120
    H = models.hessian("QNLL", cfg, y).submatrix(1, 240)
    dense = min_eigenvalue(H)
    monkeypatch.setattr(solver, "DENSE_LIMIT", 10)
    assert solver.min_eigenvalue(H) == pytest.approx(dense, rel=1e-8)


def test_sparse_path_rejects_indefinite_matrices(monkeypatch):
    monkeypatch.setattr(solver, "DENSE_LIMIT", 2)
    H = BandedSym.from_dense(np.diag([1.0, -1.0, 2.0, 3.0]))
    with pytest.raises(np.linalg.LinAlgError):
        solver.min_eigenvalue(H)
    with pytest.raises(DimensionError):
        min_eigenvalue(H, laplacian(3))


def test_report_carries_the_stability_constant():
    cfg = make_config(30, 3, 10)
    _, rep = minimize("QNL", cfg, None, None, SolveOptions(compute_min_eig=True))
    _, rep2 = minimize("QNLL", cfg, None, None, SolveOptions(compute_min_eig=True))
    assert rep.min_hessian_eigenvalue == pytest.approx(rep2.min_hessian_eigenvalue, rel=1e-8)
    mesh = unit_mesh(30)
    _, rep3 = minimize("QNL", cfg, mesh, None, SolveOptions(compute_min_eig=True))
    assert rep3.min_hessian_eigenvalue == pytest.approx(rep.min_hessian_eigenvalue, rel=1e-10)
