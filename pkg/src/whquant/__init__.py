from whquant.const import WHQUANT_VERSION
from whquant.exceptions import (
    GridMismatchError,
    KernelPathUnavailable,
    NotHermitianError,
    PreconditionError,
    UnsupportedOrderError,
    WHQuantError,
)
from whquant.types import (
    ApodizationKind,
    DomainKind,
    OperatorKind,
    PortraitPath,
    Scheme,
    TransformDirection,
    Verdict,
)
from whquant.grid import LineGrid, PhaseGrid, SampledFunction1D, SampledFunction2D, make_line_grid
from whquant.transforms import (
    convolve_1d,
    convolve_2d,
    derivative,
    fourier_1d,
    partial_fourier_p,
    reflect,
    symplectic_fourier,
    translate,
)
from whquant.operator import (
    OperatorMatrix,
    commutator,
    kinetic_matrix,
    momentum_matrix,
    position_matrix,
)
from whquant.apodization import (
    Apodization,
    AssumptionReport,
    coherent_state,
    displacement_matrix,
    pure_state_apodization,
    validate_assumptions,
    weyl_wigner_apodization,
    wigner_function,
)
from whquant.mollifiers import (
    IntervalSet,
    SmoothIndicator,
    bump_mollifier,
    gaussian_window_closed_form,
    gaussian_window_log,
    scaled_mollifier,
    smooth_indicator,
)
from whquant.quantizer import (
    CoefficientProfiles,
    TruncatedObservables,
    coefficient_profiles,
    deformed_ccr_profile,
    kernel,
    quantize_momentum_function,
    quantize_u_pn,
    trace_check,
    truncated_observables,
    window_fourier,
    window_function,
)
from whquant.analysis import (
    DeficiencyReport,
    SpectrumResult,
    WeightedOperator,
    compare_spectra,
    deficiency_analysis,
    spectrum,
    weighted_operator,
    well_reference_spectrum,
)
from whquant.portrait import Portrait, portrait_convolution, portrait_trace
from whquant.evolution import (
    Trajectory,
    compare_evolutions,
    leakage,
    propagate_eigenbasis,
    well_propagate,
)
from whquant.states import PsiPreset, gaussian_packet, load_tabulated, preset_state

__version__ = WHQUANT_VERSION

__all__ = [
    "Apodization",
    "ApodizationKind",
    "AssumptionReport",
    "CoefficientProfiles",
    "DeficiencyReport",
    "DomainKind",
    "GridMismatchError",
    "IntervalSet",
    "KernelPathUnavailable",
    "LineGrid",
    "NotHermitianError",
    "OperatorKind",
    "OperatorMatrix",
    "PhaseGrid",
    "Portrait",
    "PortraitPath",
    "PreconditionError",
    "PsiPreset",
    "SampledFunction1D",
    "SampledFunction2D",
    "Scheme",
    "SmoothIndicator",
    "SpectrumResult",
    "Trajectory",
    "TransformDirection",
    "TruncatedObservables",
    "UnsupportedOrderError",
    "Verdict",
    "WHQuantError",
    "WeightedOperator",
    "bump_mollifier",
    "coefficient_profiles",
    "coherent_state",
    "commutator",
    "compare_evolutions",
    "compare_spectra",
    "convolve_1d",
    "convolve_2d",
    "deficiency_analysis",
    "deformed_ccr_profile",
    "derivative",
    "displacement_matrix",
    "fourier_1d",
    "gaussian_packet",
    "gaussian_window_closed_form",
    "gaussian_window_log",
    "kernel",
    "kinetic_matrix",
    "leakage",
    "load_tabulated",
    "make_line_grid",
    "momentum_matrix",
    "partial_fourier_p",
    "portrait_convolution",
    "portrait_trace",
    "position_matrix",
    "preset_state",
    "propagate_eigenbasis",
    "pure_state_apodization",
    "quantize_momentum_function",
    "quantize_u_pn",
    "reflect",
    "scaled_mollifier",
    "smooth_indicator",
    "spectrum",
    "symplectic_fourier",
    "trace_check",
    "translate",
    "truncated_observables",
    "validate_assumptions",
    "weighted_operator",
    "well_propagate",
    "well_reference_spectrum",
    "weyl_wigner_apodization",
    "wigner_function",
    "window_fourier",
    "window_function",
]
