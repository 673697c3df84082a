"""Exact Birkhoff normal forms at a focus-focus point, plus the numeric
laboratory for the analytic operators that accompany them."""

__version__ = "0.1.0"

from .birkhoff import (
    LeadingMatrix,
    NormalFormResult,
    SystemSpec,
    birkhoff_normalize,
    exp_ad,
    extract_leading,
    homological_step,
    reduce_leading,
    resonant_to_bivariate,
)
from .cohomology import (
    circle_average,
    circle_solve,
    fiber_section,
    moment_right_inverse,
    poisson_bracket_fd,
    solve_bracket_system,
    transport_time,
)
from .errors import (
    CocycleViolation,
    CrossCommutingViolation,
    DegenerateLeading,
    EvalAtOrigin,
    FocusFocusError,
    GeneratorTooLow,
    NonCommuting,
    NonCritical,
    NonRealCoefficient,
    NonResonantTerm,
    OnSingularAxis,
    ParseError,
    StepOverflow,
    ValidationError,
    VerificationFailure,
)
from .fields import PhasePoint, QuadratureConfig, ScalarField, VectorField4
from .flows import (
    action_integral,
    exact_flow,
    liouville_pairing,
    numeric_flow,
    taylor_flow_check,
)
from .indices import MultiIndex
from .pipeline import PipelineConfig, run_pipeline
from .rationals import GaussianRational
from .series import (
    BivariateSeries,
    FormalSeries,
    from_real_basis,
    mul,
    poisson_bracket,
    q1_series,
    q2_series,
    q_series,
    to_real_basis,
)
from .systemio import parse_system, parse_system_document

__all__ = [
    "BivariateSeries",
    "CocycleViolation",
    "CrossCommutingViolation",
    "DegenerateLeading",
    "EvalAtOrigin",
    "FocusFocusError",
    "FormalSeries",
    "GaussianRational",
    "GeneratorTooLow",
    "LeadingMatrix",
    "MultiIndex",
    "NonCommuting",
    "NonCritical",
    "NonRealCoefficient",
    "NonResonantTerm",
    "NormalFormResult",
    "OnSingularAxis",
    "ParseError",
    "PhasePoint",
    "PipelineConfig",
    "QuadratureConfig",
    "ScalarField",
    "StepOverflow",
    "SystemSpec",
    "ValidationError",
    "VectorField4",
    "VerificationFailure",
    "action_integral",
    "birkhoff_normalize",
    "circle_average",
    "circle_solve",
    "exact_flow",
    "exp_ad",
    "extract_leading",
    "fiber_section",
    "from_real_basis",
    "homological_step",
    "liouville_pairing",
    "moment_right_inverse",
    "mul",
    "numeric_flow",
    "parse_system",
    "parse_system_document",
    "poisson_bracket",
    "poisson_bracket_fd",
    "q1_series",
    "q2_series",
    "q_series",
    "reduce_leading",
    "resonant_to_bivariate",
    "run_pipeline",
    "solve_bracket_system",
    "taylor_flow_check",
    "to_real_basis",
    "transport_time",
]
