"""Independent loop-based energies used as oracles.

Nothing here imports the package's potential or assembly code. Site and cell
terms are written out one by one, and gradients come from complex-step
differentiation, which is exact to rounding and shares no code with the
analytic derivatives under test.
"""

import cmath
from functools import lru_cache

import mpmath
import numpy as np

A, B, C = 4.4, 3.0, 5.0
RHO0 = 2 * np.exp(-3.0)


def V(d_m2, d_m1, d_p1, d_p2):
    """EAM site energy of one stencil (complex-safe)."""
    bonds = (-d_m2, -d_m1, d_p1, d_p2)
    pair = sum(cmath.exp(-2 * A * (r - 1)) - 2 * cmath.exp(-A * (r - 1)) for r in bonds)
    rho = sum(cmath.exp(-B * r) for r in bonds)
    t = rho - RHO0
    return 0.5 * pair + C * (t * t + t ** 4)


def W(s):
    return V(-2 * s, -s, s, 2 * s)


def W_mp(s):
    """Cauchy-Born density in arbitrary precision."""
    bonds = (2 * s, s, s, 2 * s)
    pair = sum(mpmath.exp(-2 * A * (r - 1)) - 2 * mpmath.exp(-A * (r - 1)) for r in bonds)
    t = sum(mpmath.exp(-B * r) for r in bonds) - 2 * mpmath.exp(-3)
    return pair / 2 + C * (t**2 + t**4)


@lru_cache(maxsize=None)
def taylor(F):
    """``(W(F), W'(F), W''(F))`` to 30 digits."""
    with mpmath.workdps(30):
        F = mpmath.mpf(F)
        return tuple(float(mpmath.diff(W_mp, F, k)) for k in range(3))


def W_lin(s, F):
    w, dw, d2w = taylor(F)
    g = s - F
    return w + dw * g + 0.5 * d2w * g * g


def _y(u, N, F):
    """Deformation as a function on all integers; homogeneous outside [-N, N]."""
    def y(xi):
        return F * xi + (u[xi + N] if -N <= xi <= N else 0.0)
    return y


def _stencil(y, xi):
    return (y(xi - 2) - y(xi), y(xi - 1) - y(xi), y(xi + 1) - y(xi), y(xi + 2) - y(xi))


def energy_atm(u, N, F=1.0):
    y = _y(u, N, F)
    v0 = V(-2 * F, -F, F, 2 * F)
    return sum(V(*_stencil(y, xi)) - v0 for xi in range(-N - 1, N + 2))


def energy_coupled(u, N, K, L, F=1.0, linear=True, nodes=None):
    """QNL (``linear=False``) or QNLL energy on a node set (default: all sites)."""
    Kb = K + 2
    nodes = list(range(-N, N + 1)) if nodes is None else list(nodes)
    val = dict(zip(nodes, u))
    y = lambda xi: F * xi + val[xi]  # noqa: E731  only nodes within [-Kb-2, Kb+2] are touched
    v0 = V(-2 * F, -F, F, 2 * F)
    w0 = W(F)
    w0_lin = taylor(F)[0]
    total = 0.0
    for xi in range(-K, K + 1):
        total += V(*_stencil(y, xi)) - v0
    dm2, dm1, dp1, dp2 = _stencil(y, -Kb)
    total += 0.5 * (V(-dp2, -dp1, dp1, dp2) - v0)
    dm2, dm1, dp1, dp2 = _stencil(y, -Kb + 1)
    total += V(2 * dm1, dm1, dp1, dp2) - v0
    dm2, dm1, dp1, dp2 = _stencil(y, Kb - 1)
    total += V(dm2, dm1, dp1, 2 * dp1) - v0
    dm2, dm1, dp1, dp2 = _stencil(y, Kb)
    total += 0.5 * (V(dm2, dm1, -dm1, -dm2) - v0)
    for a, b in zip(nodes[:-1], nodes[1:]):
        if -Kb < b and a < Kb:
            continue
        h = b - a
        s = (y(b) - y(a)) / h
        outside = a >= L or b <= -L
        if linear and outside:
            total += h * (W_lin(s, F) - w0_lin)
        else:
            total += h * (W(s) - w0)
    return total


def complex_step_gradient(energy, u, h=1e-30):
    u = np.asarray(u, dtype=complex)
    g = np.zeros(len(u))
    for i in range(1, len(u) - 1):
        up = u.copy()
        up[i] += 1j * h
        g[i] = energy(up).imag / h
    return g
