"""Design and verification toolkit for dispersion-limited two-interferometer QKD links."""

from .bb84 import (
    DetectionRow,
    DetectionTable,
    GTermAnalysis,
    PhaseChoice,
    default_baseline,
    detection_table,
    g_term_analysis,
    g_term_value,
    phase_for,
    z_difference,
)
from .compensation import (
    CompensationPlan,
    DcfParams,
    full_compensation_dcf,
    plan,
    precompensate_input,
)
from .core import (
    CALIBRATED_KAPPA_SCALE,
    DerivedQuantities,
    LinkParams,
    MzConfig,
    PAIRS,
    derive,
    x_rho,
)
from .design import (
    DesignReport,
    build_design_report,
    gate_window,
    max_rate,
    min_phase_sum,
    sweep_lengths,
    visibility_of_rho,
)
from .errors import ConfigError, InfeasibleDesignError, ResolutionError, VerificationError
from .spectra import (
    ComponentTerms,
    GridSpec,
    PrecompMultiplier,
    SpectrumCurve,
    component_terms,
    effective_moments,
    eval_analytic,
    eval_oracle,
    max_normalized_deviation,
    middle_window_masses,
    total_mass,
)
from .units import C0

__version__ = "0.1.0"

__all__ = [
    "C0",
    "CALIBRATED_KAPPA_SCALE",
    "CompensationPlan",
    "ComponentTerms",
    "ConfigError",
    "DcfParams",
    "DerivedQuantities",
    "DesignReport",
    "DetectionRow",
    "DetectionTable",
    "GTermAnalysis",
    "GridSpec",
    "InfeasibleDesignError",
    "LinkParams",
    "MzConfig",
    "PAIRS",
    "PhaseChoice",
    "PrecompMultiplier",
    "ResolutionError",
    "SpectrumCurve",
    "VerificationError",
    "build_design_report",
    "component_terms",
    "default_baseline",
    "derive",
    "detection_table",
    "effective_moments",
    "eval_analytic",
    "eval_oracle",
    "full_compensation_dcf",
    "g_term_analysis",
    "g_term_value",
    "gate_window",
    "max_normalized_deviation",
    "max_rate",
    "middle_window_masses",
    "min_phase_sum",
    "phase_for",
    "plan",
    "precompensate_input",
    "sweep_lengths",
    "total_mass",
    "visibility_of_rho",
    "x_rho",
    "z_difference",
]
