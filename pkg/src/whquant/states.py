"""
Fiducial and initial states: named presets and tabulated profiles.
"""

import logging
import math
from enum import StrEnum
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from whquant.exceptions import PreconditionError
from whquant.grid import LineGrid, SampledFunction1D

logger = logging.getLogger(__name__)


class PsiPreset(StrEnum):
    gaussian_ground = "gaussian_ground"
    """``pi^(-1/4) exp(-x²/2)``, the harmonic oscillator ground state"""
    hermite_1 = "hermite_1"
    """First excited state, whose Wigner function is negative at the origin"""


def gaussian_packet(
    grid: LineGrid, center: float = 0.0, width: float = 1.0, momentum: float = 0.0
) -> SampledFunction1D:
    """
    Normalized ``exp(-(x - center)² / (2 width²) + i momentum x)``.

    Normalized by the continuum constant, not by quadrature, so the grid norm
    deviates from 1 only by quadrature and truncation error.
    """
    if width <= 0:
        raise PreconditionError(f"width must be positive, got {width}")
    x = grid.points
    amplitude = (math.pi * width**2) ** -0.25
    values = amplitude * np.exp(-((x - center) ** 2) / (2 * width**2) + 1j * momentum * x)
    return SampledFunction1D(grid=grid, values=values)


def hermite_state(grid: LineGrid, center: float = 0.0) -> SampledFunction1D:
    x = grid.points - center
    values = math.sqrt(2) * math.pi**-0.25 * x * np.exp(-(x**2) / 2)
    return SampledFunction1D(grid=grid, values=values)


def preset_state(preset: PsiPreset | str, grid: LineGrid) -> SampledFunction1D:
    preset = PsiPreset(preset)
    if preset == PsiPreset.gaussian_ground:
        return gaussian_packet(grid)
    return hermite_state(grid)


def normalize(psi: SampledFunction1D) -> SampledFunction1D:
    """Rescale to unit grid norm"""
    norm = psi.norm()
    if norm == 0:
        raise PreconditionError("Cannot normalize the zero state")
    return psi.with_values(psi.values / norm)


def load_tabulated(path: Path, grid: LineGrid) -> SampledFunction1D:
    """
    Read a two-column ``x, value`` text table and interpolate it onto ``grid``.

    Columns are separated by whitespace or commas, ``#`` starts a comment. The profile
    is taken as zero outside the tabulated range, then normalized on the grid.

    Raises:
        PreconditionError: for tables with fewer than four rows, non-increasing ``x``,
            no tabulated support on the grid, or non-numeric or ragged rows
    """
    path = Path(path)
    text = path.read_text().replace(",", " ")
    try:
        table = np.loadtxt(text.splitlines(), comments="#", ndmin=2)
    except ValueError as e:
        raise PreconditionError(f"{path} is not a numeric table: {e}") from e
    if table.shape[1] != 2 or table.shape[0] < 4:
        raise PreconditionError(f"{path} must hold at least four rows of two columns")
    x, values = table[:, 0], table[:, 1]
    if np.any(np.diff(x) <= 0):
        raise PreconditionError(f"{path}: x column must be strictly increasing")

    spline = CubicSpline(x, values, extrapolate=False)
    sampled = np.nan_to_num(spline(grid.points), nan=0.0)
    if not np.any(sampled):
        raise PreconditionError(f"{path}: tabulated range does not overlap the grid")
    logger.debug("Loaded %d tabulated points from %s", len(x), path)
    return normalize(SampledFunction1D(grid=grid, values=sampled))
