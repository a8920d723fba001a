"""Levy white noise in the wavelet domain: simulation, weighted Besov norms, regularity estimates."""

from .analysis import (
    AnalysisConfig,
    VerificationReport,
    estimate_rho_p,
    estimate_tau_p,
    hill_pmax,
    moment_slope_curve,
    theorem_report,
)
from .besov import (
    BesovParams,
    classify_convergence,
    per_scale_contributions,
    weighted_partial_norm,
)
from .coefficients import CoefficientField
from .errors import *
from .field import (
    SimulationWindow,
    dirac_coefficient_field,
    father_coefficients,
    sample_coefficient_field,
)
from .levy_model import (
    INF,
    Family,
    JumpLaw,
    LevyModel,
    LevyTriplet,
    NoiseIndices,
    check_conditions,
    closed_form_indices,
    evaluate_psi,
    numeric_bg_indices,
    pth_moment_via_cf,
    split_triplet,
)
from .sampler import (
    CellLawSampler,
    sample_cell_integral,
    sample_impulse_field,
    validate_sampler_cf,
)
from .wavelet import WaveletSpec, build_filters, cascade_evaluate, dwt_forward

__version__ = "0.1.0"

__all__ = [
    "INF",
    "AnalysisConfig",
    "BesovParams",
    "CellLawSampler",
    "CoefficientField",
    "Family",
    "JumpLaw",
    "LevyModel",
    "LevyTriplet",
    "NoiseIndices",
    "SimulationWindow",
    "VerificationReport",
    "WaveletSpec",
    "build_filters",
    "cascade_evaluate",
    "check_conditions",
    "classify_convergence",
    "closed_form_indices",
    "dirac_coefficient_field",
    "dwt_forward",
    "estimate_rho_p",
    "estimate_tau_p",
    "evaluate_psi",
    "father_coefficients",
    "hill_pmax",
    "moment_slope_curve",
    "numeric_bg_indices",
    "per_scale_contributions",
    "pth_moment_via_cf",
    "sample_cell_integral",
    "sample_coefficient_field",
    "sample_impulse_field",
    "split_triplet",
    "theorem_report",
    "validate_sampler_cf",
    "weighted_partial_norm",
]
