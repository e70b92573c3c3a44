from collections.abc import Callable
from enum import StrEnum
from typing import Annotated, Any

import numpy as np
from annotated_types import Ge
from pydantic import AfterValidator, BeforeValidator, PlainSerializer

from whquant.types.serdes import serialize_array


class TransformDirection(StrEnum):
    """Sign of the exponent in a 1-D Fourier transform"""

    forward = "forward"
    inverse = "inverse"


class ApodizationKind(StrEnum):
    weyl_wigner = "weyl_wigner"
    pure_state = "pure_state"


class OperatorKind(StrEnum):
    """Which power of P is sandwiched between the weights"""

    momentum = "momentum"
    kinetic = "kinetic"


class Scheme(StrEnum):
    """Discretization of the momentum operator"""

    spectral = "spectral"
    central_diff = "central_diff"


class DomainKind(StrEnum):
    whole_line = "whole_line"
    interval = "interval"


class Verdict(StrEnum):
    essentially_self_adjoint = "essentially_self_adjoint"
    deficient = "deficient"
    inconclusive = "inconclusive"


class PortraitPath(StrEnum):
    trace_form = "trace_form"
    convolution_form = "convolution_form"


def _power_of_two(n: int) -> int:
    assert (n & (n - 1) == 0) and n != 0, "Grid size must be a power of two"
    return n


GridSize = Annotated[int, Ge(8), AfterValidator(_power_of_two)]


def _as_array(dtype: type) -> Callable[[Any], np.ndarray]:
    def _validate(value: Any) -> np.ndarray:
        arr = np.asarray(value, dtype=dtype)
        if arr.flags.writeable:
            arr = arr.copy()
        assert np.all(np.isfinite(arr)), "Array entries must be finite"
        arr.flags.writeable = False
        return arr

    return _validate


ComplexArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_array(np.complex128)),
    PlainSerializer(serialize_array, when_used="json"),
]
"""Read-only, finite complex array"""
RealArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_array(np.float64)),
    PlainSerializer(serialize_array, when_used="json"),
]
"""Read-only, finite real array"""
