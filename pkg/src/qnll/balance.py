"""Quasi-optimal region sizes ``(Kbar, L, N)`` from the core size and decay rate."""

from __future__ import annotations

from dataclasses import dataclass
import math

from .lattice import ConfigError, R_CUT


@dataclass(frozen=True)
class BalancePlan:
    K: int
    Kbar: int
    L: int
    N: int
    regime: str
    alpha: float
    rule_applied: str

    def __post_init__(self):
        if not (self.Kbar == self.K + R_CUT and self.Kbar <= self.L <= self.N):
            raise ConfigError(f"inconsistent plan {self}")

    CSV_HEADER = "K,Kbar,L,N,regime,alpha,rule_applied"

    def csv_row(self) -> str:
        return f"{self.K},{self.Kbar},{self.L},{self.N},{self.regime},{self.alpha},{self.rule_applied}"


def _check(K: int, alpha: float):
    if alpha <= 0.5:
        raise ConfigError(f"alpha must exceed 1/2, got {alpha}")
    if K <= 0:
        raise ConfigError(f"K must be positive, got {K}")


def _ceil_pow(base: float, expo: float) -> int:
    # guard against a power that lands a few ulps above an integer
    v = base ** expo
    r = round(v)
    return int(r) if abs(v - r) <= 1e-9 * max(1.0, v) else math.ceil(v)


def l_exponent_no_coarse(alpha: float) -> float:
    return 0.5 + 5.0 / (8.0 * alpha - 2.0)


def l_exponent_coarse(alpha: float) -> float:
    return 0.5 + 3.0 / (8.0 * alpha - 2.0)


def n_from_l(L: int, alpha: float) -> int:
    return _ceil_pow(L, (2 * alpha - 0.5) / (alpha - 0.5))


def n_from_kbar(Kbar: int, alpha: float) -> int:
    return _ceil_pow(Kbar, (alpha + 0.5) / (alpha - 0.5))


def plan_no_coarse(K: int, alpha: float) -> BalancePlan:
    """Sizes for the full-lattice QNLL method."""
    _check(K, alpha)
    Kbar = K + R_CUT
    if alpha < 1.5:
        L, rule = _ceil_pow(Kbar, l_exponent_no_coarse(alpha)), "L=Kbar^(1/2+5/(8a-2))"
    else:
        L, rule = Kbar, "L=Kbar"
    N = max(n_from_l(L, alpha), L)
    return BalancePlan(K, Kbar, L, N, "no_coarse", float(alpha), rule + ";N=L^((2a-1/2)/(a-1/2))")


def plan_coarse(K: int, alpha: float) -> BalancePlan:
    """Sizes for the coarse-grained QNLL method."""
    _check(K, alpha)
    Kbar = K + R_CUT
    if alpha < 1.0:
        L = _ceil_pow(Kbar, l_exponent_coarse(alpha))
        N, rule = max(n_from_l(L, alpha), L), "L=Kbar^(1/2+3/(8a-2));N=L^((2a-1/2)/(a-1/2))"
    else:
        L = Kbar
        N, rule = max(n_from_kbar(Kbar, alpha), L), "L=Kbar;N=Kbar^((a+1/2)/(a-1/2))"
    return BalancePlan(K, Kbar, L, N, "coarse", float(alpha), rule)


def plan(regime: str, K: int, alpha: float) -> BalancePlan:
    if regime == "no_coarse":
        return plan_no_coarse(K, alpha)
    if regime == "coarse":
        return plan_coarse(K, alpha)
    raise ValueError(f"unknown regime {regime!r}; expected 'no_coarse' or 'coarse'")
