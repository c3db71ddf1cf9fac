"""Atomistic/continuum coupling in one dimension: ATM, QNL and QNLL models."""

from .balance import BalancePlan, plan_coarse, plan_no_coarse
from .banded import BandedSym, laplacian, mesh_laplacian
from .coarse import (Mesh, MeshField, build_mesh, coarse_energy, coarse_gradient,
                     coarse_hessian, interpolate, prolong, trapezoid_pair)
from .lattice import (ConfigError, DimensionError, LatticeField, ProblemConfig,
                      RegionPartition, deformation, grad_l2_norm, homogeneous, make_config)
from .models import (ModelKind, StressField, energy, exact_displacement, external_force_for,
                     gradient, hessian, stress_error, stress_field)
from .potential import EamParams, cauchy_born
from .solver import SolveOptions, SolveReport, min_eigenvalue, minimize

__all__ = [
    "BalancePlan", "plan_coarse", "plan_no_coarse",
    "BandedSym", "laplacian", "mesh_laplacian",
    "Mesh", "MeshField", "build_mesh", "coarse_energy", "coarse_gradient", "coarse_hessian",
    "interpolate", "prolong", "trapezoid_pair",
    "ConfigError", "DimensionError", "LatticeField", "ProblemConfig", "RegionPartition",
    "deformation", "grad_l2_norm", "homogeneous", "make_config",
    "ModelKind", "StressField", "energy", "exact_displacement", "external_force_for",
    "gradient", "hessian", "stress_error", "stress_field",
    "EamParams", "cauchy_born",
    "SolveOptions", "SolveReport", "min_eigenvalue", "minimize",
]
