"""Nonlocal convection-diffusion on hyperbolic space and its local limits."""

from . import experiments, field, hypgeom, kernels, localref, nonlocal_ops, quadrature
from .experiments import (
    ConvergenceReport,
    SimConfig,
    emit_report,
    run_convdiff_convergence,
    run_selftest,
    run_transport_convergence,
)
from .field import Grid, ScalarField, Trajectory
from .nonlocal_ops import NonlocalOperator, evolve_nonlocal

__all__ = [
    "ConvergenceReport",
    "Grid",
    "NonlocalOperator",
    "ScalarField",
    "SimConfig",
    "Trajectory",
    "emit_report",
    "evolve_nonlocal",
    "experiments",
    "field",
    "hypgeom",
    "kernels",
    "localref",
    "nonlocal_ops",
    "quadrature",
    "run_convdiff_convergence",
    "run_selftest",
    "run_transport_convergence",
]
