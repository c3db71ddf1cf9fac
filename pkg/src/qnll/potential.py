"""EAM site potential, its analytic derivatives, and Cauchy-Born densities.

Stencils are ordered ``(D_-2 y, D_-1 y, D_1 y, D_2 y)``. Bonds to the left
enter the pair and density functions with a sign flip so that every
argument is a positive bond length in the reference state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

# sign applied to each stencil entry before it reaches phi/psi
SIGN = np.array([-1.0, -1.0, 1.0, 1.0])


@dataclass(frozen=True)
class EamParams:
    a: float = 4.4
    b: float = 3.0
    c: float = 5.0
    rho0: float = field(default=float("nan"))

    def __post_init__(self):
        if math.isnan(self.rho0):
            object.__setattr__(self, "rho0", 2.0 * math.exp(-self.b))


DEFAULT_EAM = EamParams()


# -- one-dimensional building blocks ---------------------------------------

def phi(r, p: EamParams = DEFAULT_EAM):
    return np.exp(-2 * p.a * (r - 1)) - 2 * np.exp(-p.a * (r - 1))


def dphi(r, p: EamParams = DEFAULT_EAM):
    return -2 * p.a * np.exp(-2 * p.a * (r - 1)) + 2 * p.a * np.exp(-p.a * (r - 1))


def d2phi(r, p: EamParams = DEFAULT_EAM):
    return 4 * p.a**2 * np.exp(-2 * p.a * (r - 1)) - 2 * p.a**2 * np.exp(-p.a * (r - 1))


def psi(r, p: EamParams = DEFAULT_EAM):
    return np.exp(-p.b * r)


def dpsi(r, p: EamParams = DEFAULT_EAM):
    return -p.b * np.exp(-p.b * r)


def d2psi(r, p: EamParams = DEFAULT_EAM):
    return p.b**2 * np.exp(-p.b * r)


def embed(rho, p: EamParams = DEFAULT_EAM):
    t = rho - p.rho0
    return p.c * (t**2 + t**4)


def dembed(rho, p: EamParams = DEFAULT_EAM):
    t = rho - p.rho0
    return p.c * (2 * t + 4 * t**3)


def d2embed(rho, p: EamParams = DEFAULT_EAM):
    t = rho - p.rho0
    return p.c * (2 + 12 * t**2)


# -- increments ``f(r0 + dr) - f(r0)`` without cancellation --------------------

def phi_increment(r0, dr, p: EamParams = DEFAULT_EAM):
    e1 = np.exp(-p.a * (r0 - 1))
    return e1 * e1 * np.expm1(-2 * p.a * dr) - 2 * e1 * np.expm1(-p.a * dr)


def psi_increment(r0, dr, p: EamParams = DEFAULT_EAM):
    return np.exp(-p.b * r0) * np.expm1(-p.b * dr)


def embed_increment(rho, drho, p: EamParams = DEFAULT_EAM):
    t0 = rho - p.rho0
    t1 = t0 + drho
    sq = drho * (t0 + t1)          # t1^2 - t0^2
    return p.c * (sq + sq * (t1 * t1 + t0 * t0))


# -- site potential ---------------------------------------------------------

def _real(g) -> np.ndarray:
    """Inexact array: integers are promoted, float and complex kinds are kept."""
    g = np.asarray(g)
    return g if np.issubdtype(g.dtype, np.inexact) else g.astype(float)


def v_site(g, p: EamParams = DEFAULT_EAM):
    """Site energy for stencil(s) ``g`` of shape ``(..., 4)``."""
    r = _real(g) * SIGN
    return 0.5 * phi(r, p).sum(axis=-1) + embed(psi(r, p).sum(axis=-1), p)


def v_site_increment(g0, dg, p: EamParams = DEFAULT_EAM):
    """``v_site(g0 + dg) - v_site(g0)``, accurate when ``dg`` is small."""
    r0 = _real(g0) * SIGN
    dr = _real(dg) * SIGN
    rho = psi(r0, p).sum(axis=-1)
    drho = psi_increment(r0, dr, p).sum(axis=-1)
    return 0.5 * phi_increment(r0, dr, p).sum(axis=-1) + embed_increment(rho, drho, p)


def v_grad(g, p: EamParams = DEFAULT_EAM):
    """Partial derivatives of :func:`v_site` with respect to the stencil."""
    r = _real(g) * SIGN
    rho = psi(r, p).sum(axis=-1)
    return SIGN * (0.5 * dphi(r, p) + dembed(rho, p)[..., None] * dpsi(r, p))


def v_hess(g, p: EamParams = DEFAULT_EAM):
    """Second derivatives of :func:`v_site`, shape ``(..., 4, 4)``, symmetric."""
    r = _real(g) * SIGN
    rho = psi(r, p).sum(axis=-1)
    dp = SIGN * dpsi(r, p)
    diag = 0.5 * d2phi(r, p) + dembed(rho, p)[..., None] * d2psi(r, p)
    H = d2embed(rho, p)[..., None, None] * (dp[..., :, None] * dp[..., None, :])
    idx = np.arange(4)
    H[..., idx, idx] += diag
    return H


# -- Cauchy-Born density ----------------------------------------------------

@dataclass(frozen=True)
class CauchyBornCoeffs:
    F: float
    W_F: float
    Wp_F: float
    Wpp_F: float


def homogeneous_stencil(F: float) -> np.ndarray:
    return np.array([-2.0, -1.0, 1.0, 2.0]) * F


def cauchy_born(F: float, p: EamParams = DEFAULT_EAM) -> CauchyBornCoeffs:
    """``W(F) = V(F R)`` and its first two derivatives via stencil contractions."""
    g = homogeneous_stencil(F)
    rho = np.array([-2.0, -1.0, 1.0, 2.0])
    return CauchyBornCoeffs(
        F=float(F),
        W_F=float(v_site(g, p)),
        Wp_F=float(rho @ v_grad(g, p)),
        Wpp_F=float(rho @ v_hess(g, p) @ rho),
    )


def w_density(s, p: EamParams = DEFAULT_EAM):
    """Vectorised ``W(s)``; same value as ``v_site`` on the homogeneous stencil."""
    return phi(s, p) + phi(2 * s, p) + embed(2 * psi(s, p) + 2 * psi(2 * s, p), p)


def w_increment(s, e, p: EamParams = DEFAULT_EAM):
    """``w_density(s + e) - w_density(s)``, accurate when ``e`` is small."""
    rho = 2 * psi(s, p) + 2 * psi(2 * s, p)
    drho = 2 * psi_increment(s, e, p) + 2 * psi_increment(2 * s, 2 * e, p)
    return (phi_increment(s, e, p) + phi_increment(2 * s, 2 * e, p)
            + embed_increment(rho, drho, p))


def dw_density(s, p: EamParams = DEFAULT_EAM):
    rho = 2 * psi(s, p) + 2 * psi(2 * s, p)
    drho = 2 * dpsi(s, p) + 4 * dpsi(2 * s, p)
    return dphi(s, p) + 2 * dphi(2 * s, p) + dembed(rho, p) * drho


def d2w_density(s, p: EamParams = DEFAULT_EAM):
    rho = 2 * psi(s, p) + 2 * psi(2 * s, p)
    drho = 2 * dpsi(s, p) + 4 * dpsi(2 * s, p)
    d2rho = 2 * d2psi(s, p) + 8 * d2psi(2 * s, p)
    return (d2phi(s, p) + 4 * d2phi(2 * s, p)
            + d2embed(rho, p) * drho**2 + dembed(rho, p) * d2rho)


def w_lin(gradu, coeffs: CauchyBornCoeffs):
    """Second-order Taylor model of ``W`` about ``F`` in the displacement gradient."""
    return coeffs.W_F + coeffs.Wp_F * gradu + 0.5 * coeffs.Wpp_F * gradu * gradu


def dw_lin(gradu, coeffs: CauchyBornCoeffs):
    return coeffs.Wp_F + coeffs.Wpp_F * gradu
