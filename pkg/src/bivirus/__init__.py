"""Bi-virus SIS epidemic model on directed graphs.

Regime classification by spectral thresholds, trajectory simulation,
equilibrium computation with stability verdicts, sensitivity of the
epidemic state, and proportional healing-feedback experiments.
"""

__version__ = "0.1.0"

from .control import FeedbackGains, closed_loop_transform, constant_healing_baseline, repeller_experiment
from .dynamics import (
    IntegratorConfig,
    Method,
    TerminalReason,
    TrajectoryRecord,
    lyapunov_trace,
    positivity_time,
    simulate,
    simulate_single,
    write_trajectory_csv,
)
from .equilibria import (
    EquilibriumKind,
    EquilibriumReport,
    Fitness,
    FixedPointConfig,
    Regime,
    RegimeLabel,
    Verdict,
    classify,
    coexistence_continuum,
    enumerate_equilibria,
    epidemic_threshold,
    solve_epidemic,
)
from .estimator import BiVirusSIS, SingleVirusSIS
from .exceptions import (
    BiVirusError,
    ConfigError,
    ConsistencyError,
    DomainError,
    NumericalError,
    PreconditionError,
    ValidationError,
)
from .model import BiVirusModel, SystemState, VirusParams, bivirus_field, jacobian, validate
from .netgraph import ContactGraph, adjacency_matrix, check_irreducible
from .sensitivity import Perturbation, monotonicity_report, sensitivity_solve
from .spectral import perron_pair, spectral_abscissa, spectral_radius, threshold_trichotomy

__all__ = [
    "BiVirusError", "BiVirusModel", "BiVirusSIS", "ConfigError", "ConsistencyError", "ContactGraph",
    "DomainError", "EquilibriumKind", "EquilibriumReport", "FeedbackGains", "Fitness", "FixedPointConfig",
    "IntegratorConfig", "Method", "NumericalError", "Perturbation", "PreconditionError", "Regime",
    "RegimeLabel", "SingleVirusSIS", "SystemState", "TerminalReason", "TrajectoryRecord",
    "ValidationError", "Verdict", "VirusParams", "adjacency_matrix", "bivirus_field", "check_irreducible",
    "classify", "closed_loop_transform", "coexistence_continuum", "constant_healing_baseline",
    "enumerate_equilibria", "epidemic_threshold", "jacobian", "lyapunov_trace", "monotonicity_report",
    "perron_pair", "positivity_time", "repeller_experiment", "sensitivity_solve", "simulate",
    "simulate_single", "solve_epidemic", "spectral_abscissa", "spectral_radius", "threshold_trichotomy",
    "validate", "write_trajectory_csv",
]
