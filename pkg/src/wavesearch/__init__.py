"""Resonant energy transfer between standing-wave modes as a classical
analog of quantum search."""
from .analysis import find_peak, late_oscillation_metric, rwa_deviation, scaling_study
from .dynamics import IntegratorConfig, Trajectory, default_initial, integrate, norm_deviation
from .rwa import RwaModel, build_rwa
from .spectrum import SearchProblem, linear_spectrum, make_problem, quadratic_spectrum

__all__ = [
    "IntegratorConfig",
    "RwaModel",
    "SearchProblem",
    "Trajectory",
    "build_rwa",
    "default_initial",
    "find_peak",
    "integrate",
    "late_oscillation_metric",
    "linear_spectrum",
    "make_problem",
    "norm_deviation",
    "quadratic_spectrum",
    "rwa_deviation",
    "scaling_study",
]
