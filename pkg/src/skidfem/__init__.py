"""skidfem: hysteretic friction of a viscoelastic skid on rigid rough profiles.

2D plane-strain FEM with an embedded-profile interface layer, a generalized
Maxwell rheology, and an ISO-style profile roughness toolkit.
"""

__version__ = "0.1.0"

from . import errors
from .material import (PronySeries, SBR_THREE_ARM, SINGLE_ARM_BENCH,
                       complex_modulus, critical_velocity, fit_prony,
                       load_material, optimal_t1, relaxation_modulus,
                       save_material)
from .profile import (Profile, RawProfile, SplineTable, build_spline,
                      downsample, eval_spline, eval_spline_slope,
                      gaussian_s_filter, level, load_profile, rebase,
                      save_profile, sine_profile, synthetic_rough_profile)
from .roughness import (RoughnessReport, amplitude_params, element_params,
                        mpd, roughness_report, section_params)
from .sim import (FrictionResult, SimulationConfig, analytic_mu_sine,
                  log_centered_velocities, run_phase1, run_phase2, run_single,
                  run_sweep)

__all__ = [
    "errors", "PronySeries", "SBR_THREE_ARM", "SINGLE_ARM_BENCH",
    "complex_modulus", "critical_velocity", "fit_prony", "load_material",
    "optimal_t1", "relaxation_modulus", "save_material",
    "Profile", "RawProfile", "SplineTable", "build_spline", "downsample",
    "eval_spline", "eval_spline_slope", "gaussian_s_filter", "level",
    "load_profile", "rebase", "save_profile", "sine_profile",
    "synthetic_rough_profile",
    "RoughnessReport", "amplitude_params", "element_params", "mpd",
    "roughness_report", "section_params",
    "FrictionResult", "SimulationConfig", "analytic_mu_sine",
    "log_centered_velocities", "run_phase1", "run_phase2", "run_single",
    "run_sweep",
]
