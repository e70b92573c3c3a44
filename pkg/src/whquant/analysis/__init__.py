from whquant.analysis.deficiency import DeficiencyBranch, DeficiencyReport, deficiency_analysis
from whquant.analysis.weighted import (
    SpectralComparison,
    SpectralRow,
    SpectrumResult,
    WeightedOperator,
    compare_spectra,
    spectrum,
    weighted_operator,
    well_reference_spectrum,
)

__all__ = [
    "DeficiencyBranch",
    "DeficiencyReport",
    "SpectralComparison",
    "SpectralRow",
    "SpectrumResult",
    "WeightedOperator",
    "compare_spectra",
    "deficiency_analysis",
    "spectrum",
    "weighted_operator",
    "well_reference_spectrum",
]
