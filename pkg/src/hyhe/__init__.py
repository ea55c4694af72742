"""Helium ground-state energy by the correlated variational method.

Library pipeline: enumerate a graded basis, assemble exact operator
matrices, solve the generalized eigenproblem with a self-consistent scale
exponent at arbitrary precision, then add the alpha^2 and alpha^3
perturbative corrections evaluated on the solved state.
"""

__version__ = "hyhe 0.1.0"

from .basis import BasisTerm, SteuExpression, enumerate_basis
from .config import RunConfig, load_config, DEFAULT_SWEEP
from .constants import PhysicalConstants, default_constants
from .corrections import CorrectionBreakdown, breit_correction, \
    radiative_correction, total_energy
from .eigen import VariationalResult, ground_state_pair, optimize_k, \
    solve_fixed_k, build_systems
from .integrals import IntegralTable, base_integral, log_integral, \
    quad_integral, raw_moment
from .matrices import ExpectationSet, OperatorMatrices, \
    build_operator_matrices, delta_expectations, expectation_set, \
    log_momentum_expectation, p4_expectation
from .oracles import ElectronConfiguration, hydrogenic_reference
from .report import ReportDocument, Row, run_tables

__all__ = [
    "BasisTerm", "SteuExpression", "enumerate_basis",
    "RunConfig", "load_config", "DEFAULT_SWEEP",
    "PhysicalConstants", "default_constants",
    "CorrectionBreakdown", "breit_correction", "radiative_correction",
    "total_energy",
    "VariationalResult", "ground_state_pair", "optimize_k", "solve_fixed_k",
    "build_systems",
    "IntegralTable", "base_integral", "log_integral", "quad_integral",
    "raw_moment",
    "ExpectationSet", "OperatorMatrices", "build_operator_matrices",
    "delta_expectations", "expectation_set", "log_momentum_expectation",
    "p4_expectation",
    "ElectronConfiguration", "hydrogenic_reference",
    "ReportDocument", "Row", "run_tables",
]
