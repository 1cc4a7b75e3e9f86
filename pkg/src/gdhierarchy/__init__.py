"""Exact engine for the r-th Gelfand-Dickey hierarchy, its wave function and
the closed, extended and open r-spin correlators read off from it."""
from .checks import CHECKS, CheckReport, run_checks
from .kernels import BACKEND
from .potentials import CorrelatorTable, DictionaryMap, build_table
from .psdo import PsDO, SeriesRing, Symbol, compose, inverse, power_frac, rth_root
from .scalars import CycScalar, Q
from .series import SeriesSpace, TSeries
from .solver import ConfigError, HierarchyState, TruncationSpec, solve_jets, stratify
from .wave import WaveState, phi_stratum, solve_phi

__version__ = "0.1.0"

__all__ = [
    "CHECKS", "CheckReport", "run_checks", "CorrelatorTable", "DictionaryMap", "build_table",
    "BACKEND", "PsDO", "SeriesRing", "Symbol", "compose", "inverse", "power_frac", "rth_root",
    "CycScalar", "Q", "SeriesSpace", "TSeries", "ConfigError", "HierarchyState",
    "TruncationSpec", "solve_jets", "stratify", "WaveState", "phi_stratum", "solve_phi",
]
