"""Spectral simulation and stabilization checks for the generalized
Korteweg-de Vries-Burgers-Huxley equation under boundary feedback."""

__version__ = "0.1.0"

from .analysis import (
    RunRecord,
    envelope_check_h1,
    envelope_check_l2,
    envelope_check_pointwise,
    fit_decay_rate,
    flux_law_l2_rate,
    functional_suite,
    h1_seminorm,
    inequality_oracles,
    l2_norm,
    max_norm,
    simple_law_rate,
    simple_law_threshold,
)
from .config import SimConfig, parse_config
from .control import ControlLaw, boundary_residual, g1, g2
from .model import ModelParams, State, rhs, rhs_jacobian, weak_pairing
from .spectral import Grid, build_grid, integrate
from .timestepper import SolverSettings, project_initial, simulate, step

__all__ = [
    "ControlLaw", "Grid", "ModelParams", "RunRecord", "SimConfig", "SolverSettings", "State",
    "boundary_residual", "build_grid", "envelope_check_h1", "envelope_check_l2",
    "envelope_check_pointwise", "fit_decay_rate", "flux_law_l2_rate", "functional_suite",
    "g1", "g2", "h1_seminorm", "inequality_oracles", "integrate", "l2_norm", "max_norm",
    "parse_config", "project_initial", "rhs", "rhs_jacobian", "simple_law_rate",
    "simple_law_threshold", "simulate", "step", "weak_pairing",
]
