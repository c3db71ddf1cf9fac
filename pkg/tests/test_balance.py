import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from qnll.balance import (BalancePlan, l_exponent_coarse, l_exponent_no_coarse, n_from_kbar,
                          plan, plan_coarse, plan_no_coarse)
from qnll.coarse import build_mesh
from qnll.lattice import ConfigError


def mp_ceil_pow(base, num, den):
    with mpmath.workdps(40):
        return int(mpmath.ceil(mpmath.power(base, mpmath.mpf(num) / mpmath.mpf(den))))


def test_no_coarse_example():
    p = plan_no_coarse(4, 1.2)
    assert (p.Kbar, p.L) == (6, 8)
    assert p.L == mp_ceil_pow(6, "8.8", "7.6")  # exponent 1/2 + 5/7.6
    # 8^(1.9/0.7) is 282.65, whose ceiling is 283
    assert p.N == mp_ceil_pow(8, "1.9", "0.7") == 283


@pytest.mark.parametrize("alpha", [1.5, 1.8, 2.5])
def test_no_coarse_fast_decay_keeps_linear_region_at_interface(alpha):
    p = plan_no_coarse(4, alpha)
    assert p.L == p.Kbar == 6
    assert p.N >= p.L
    assert p.rule_applied.startswith("L=Kbar;")


def test_coarse_examples():
    p = plan_coarse(4, 0.8)
    assert (p.Kbar, p.L) == (6, 9)
    assert p.N == mp_ceil_pow(9, "1.1", "0.3")
    p = plan_coarse(4, 1.2)
    assert (p.L, p.N) == (6, 78)
    assert p.N == mp_ceil_pow(6, "1.7", "0.7")
    p = plan_coarse(4, 1.0)
    assert p.L == p.Kbar and p.N == 6**3


def test_exact_integer_powers_are_not_bumped():
    assert n_from_kbar(2, 1.0) == 8
    assert n_from_kbar(10, 1.0) == 1000


@pytest.mark.parametrize("regime", ["no_coarse", "coarse"])
@pytest.mark.parametrize("alpha", [0.6, 0.8, 1.0, 1.2, 1.49, 1.5, 1.8])
@given(K=st.integers(2, 63))
def test_sizes_are_monotone_in_core_size(regime, alpha, K):
    a, b = plan(regime, K, alpha), plan(regime, K + 1, alpha)
    assert a.L <= b.L and a.N <= b.N
    assert a.Kbar <= a.L <= a.N


def test_exponents_tend_to_one_at_the_branch_points():
    assert l_exponent_no_coarse(1.5 - 1e-9) == pytest.approx(1.0, abs=1e-8)
    assert l_exponent_coarse(1.0 - 1e-9) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("alpha", [1.0, 1.2, 1.5])
@pytest.mark.parametrize("K", [2, 4, 8, 16, 32])
def test_coarse_plan_matches_mesh_domain(alpha, K):
    p = plan_coarse(K, alpha)
    _, N = build_mesh(K, p.L, alpha)
    assert N == p.N


def test_invalid_inputs():
    with pytest.raises(ConfigError):
        plan_no_coarse(4, 0.5)
    with pytest.raises(ConfigError):
        plan_coarse(0, 1.2)
    with pytest.raises(ValueError):
        plan("bogus", 4, 1.2)
    with pytest.raises(ConfigError):
        BalancePlan(4, 5, 8, 100, "coarse", 1.2, "x")


def test_plan_prints_as_csv_row():
    p = plan_coarse(4, 1.2)
    assert p.csv_row().split(",")[:4] == ["4", "6", "6", "78"]
    assert len(BalancePlan.CSV_HEADER.split(",")) == 7
    assert math.isclose(float(p.csv_row().split(",")[5]), 1.2)
