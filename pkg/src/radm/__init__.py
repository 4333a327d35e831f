"""Pseudo-spectral solver for a reduced approximate-deconvolution turbulence
model on the periodic box, plus exact pulsatile-flow profiles."""
from ._kernels import backend
from .config import ConfigError, PulsatileConfig, RunConfig
from .diagnostics import EnergyReport, Spectrum, compute_energies, compute_spectrum, fit_slope
from .filters import SymbolTable, helmholtz_symbol, van_cittert_symbol
from .pulsatile import (
    PulsatileCase,
    alpha_womersley,
    channel_profile,
    mode_coefficient,
    pipe_profile,
    womersley,
)
from .solver import Integrator, ModelParams, RADMSolver, SolverState, initial_field
from .spectral import Grid, SpectralField, brute_force_convect, convect, read_checkpoint, write_checkpoint

__version__ = "0.1.0"

__all__ = [
    "backend",
    "ConfigError",
    "PulsatileConfig",
    "RunConfig",
    "EnergyReport",
    "Spectrum",
    "compute_energies",
    "compute_spectrum",
    "fit_slope",
    "SymbolTable",
    "helmholtz_symbol",
    "van_cittert_symbol",
    "PulsatileCase",
    "alpha_womersley",
    "channel_profile",
    "mode_coefficient",
    "pipe_profile",
    "womersley",
    "Integrator",
    "ModelParams",
    "RADMSolver",
    "SolverState",
    "initial_field",
    "Grid",
    "SpectralField",
    "brute_force_convect",
    "convect",
    "read_checkpoint",
    "write_checkpoint",
]
