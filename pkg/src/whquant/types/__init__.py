from whquant.types.common import (
    ApodizationKind,
    ComplexArray,
    DomainKind,
    GridSize,
    OperatorKind,
    PortraitPath,
    RealArray,
    Scheme,
    TransformDirection,
    Verdict,
)
from whquant.types.serdes import serialize_array

__all__ = [
    "ApodizationKind",
    "ComplexArray",
    "DomainKind",
    "GridSize",
    "OperatorKind",
    "PortraitPath",
    "RealArray",
    "Scheme",
    "TransformDirection",
    "Verdict",
    "serialize_array",
]
