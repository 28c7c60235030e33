"""Fractional-order control toolkit.

Grunwald-Letnikov differintegration and Mittag-Leffler evaluation,
n-term fractional plant simulation, discrete PI^lambda D^delta control,
closed-loop simulation with step-response metrics, controller synthesis
by dominant root placement and plant identification from measured data.
"""

from .fraccalc import (MAX_SERIES_TERMS, CoefficientTable, ConvergenceError,
                       DifferintegralSpec, binomial_coeffs, gamma,
                       gl_differint, mittag_leffler, ml_derivative)
from .plant import (FractionalPlant, PlantValidationError, TimeGrid,
                    analytic_solution, difference_weights, simulate_plant,
                    validate_plant)
from .controller import (ControllerState, FoPidController, control_step,
                         control_terms, filter_setpoint, push_error, reset)
from .loopsim import (LoopConfig, LoopDivergedError, PerformanceMetrics,
                      SimulationTrace, compute_metrics, simulate_closed_loop)
from .synthesis import (DominantPoleSpec, NonPhysicalSolutionError,
                        StabilityReport, SynthesisConvergenceError,
                        SynthesisMode, SynthesisResult, char_residual,
                        find_dominant_roots, min_gain, poles_from_measures,
                        solve_controller_params, verify_stability)
from .identify import (IdentProblem, IdentResult, MeasuredResponse,
                       identify, objective_q)

__version__ = "0.1.0"

__all__ = [
    "MAX_SERIES_TERMS",
    "CoefficientTable",
    "ConvergenceError",
    "ControllerState",
    "DifferintegralSpec",
    "DominantPoleSpec",
    "FoPidController",
    "FractionalPlant",
    "IdentProblem",
    "IdentResult",
    "LoopConfig",
    "LoopDivergedError",
    "MeasuredResponse",
    "NonPhysicalSolutionError",
    "PerformanceMetrics",
    "PlantValidationError",
    "SimulationTrace",
    "StabilityReport",
    "SynthesisConvergenceError",
    "SynthesisMode",
    "SynthesisResult",
    "TimeGrid",
    "analytic_solution",
    "binomial_coeffs",
    "char_residual",
    "compute_metrics",
    "control_step",
    "control_terms",
    "difference_weights",
    "filter_setpoint",
    "find_dominant_roots",
    "gamma",
    "gl_differint",
    "identify",
    "min_gain",
    "mittag_leffler",
    "ml_derivative",
    "objective_q",
    "poles_from_measures",
    "push_error",
    "reset",
    "simulate_closed_loop",
    "simulate_plant",
    "solve_controller_params",
    "validate_plant",
    "verify_stability",
]
