"""Spontaneous emission of an atom near a nanofiber inside a fiber-Bragg-grating cavity."""

from .cavity_response import (CavityReport, CavitySpec, impact_bounds, impact_factor,
                              impact_series, overdamped_report, phase_per_crossing, tune_length)
from .decay_engine import (DecayTrace, DelayParams, analytic_center_solution, delay_params,
                           detect_oscillations, fit_decay_rate, simulate_decay)
from .emission_rates import (AtomSpec, RateReport, gamma_guided, gamma_nonrad_ratio, gamma_rad,
                             rates)
from .fiber_modes import FiberSpec, GuidedModeSolution, effective_area, solve_fundamental
from .single_mode import (SingleModeReport, classify_regime, compare_with_dde, critical_lengths,
                          overdamped_impact, resonant_solution, single_mode_params)

__version__ = "0.1.0"
