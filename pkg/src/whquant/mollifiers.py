"""
Smooth approximations of interval indicators, and the Gaussian window in closed form.

``u_{E,sigma} = omega_sigma * chi_E`` where ``omega_sigma(x) = omega(x/sigma)/sigma`` is a
scaled bump of unit mass. ``sigma = 0`` gives the sampled indicator itself.
"""

import logging
import math
from typing import Self

import numpy as np
import scipy.special
from pydantic import Field, model_validator
from scipy.interpolate import PchipInterpolator

from whquant.base import ArrayModel
from whquant.const import CLIP_TOL, MIN_MOLLIFIER_POINTS
from whquant.exceptions import PreconditionError
from whquant.grid import LineGrid, SampledFunction1D
from whquant.transforms import antiderivative, convolve_1d, translate_rows

logger = logging.getLogger(__name__)

_LOG_HALF_SQRT_PI = math.log(math.sqrt(math.pi) / 2)


class IntervalSet(ArrayModel):
    """The open interval ``E = (alpha, beta)``"""

    alpha: float
    beta: float

    @model_validator(mode="after")
    def ordered(self) -> Self:
        assert self.alpha < self.beta, f"Need alpha < beta, got ({self.alpha}, {self.beta})"
        return self

    @property
    def width(self) -> float:
        return self.beta - self.alpha

    @property
    def midpoint(self) -> float:
        return (self.alpha + self.beta) / 2

    def mask(self, x: np.ndarray) -> np.ndarray:
        """
        Membership of sample points.

        Half-open ``alpha <= x < beta``, so that node-aligned endpoints count
        exactly ``width/dx`` nodes.
        """
        return (x >= self.alpha) & (x < self.beta)

    def indicator(self, grid: LineGrid) -> SampledFunction1D:
        return SampledFunction1D(grid=grid, values=self.mask(grid.points).astype(float))

    def on_grid(self, grid: LineGrid) -> bool:
        """Whether both endpoints are grid nodes"""
        return grid.has_node(self.alpha) and grid.has_node(self.beta)


class SmoothIndicator(ArrayModel):
    interval: IntervalSet
    sigma: float = Field(ge=0)
    values: SampledFunction1D

    @model_validator(mode="after")
    def bounded(self) -> Self:
        assert np.all(self.values.values.real >= 0), "Smooth indicator must be nonnegative"
        assert np.all(self.values.values.real <= 1 + CLIP_TOL), "Smooth indicator must be <= 1"
        return self

    @property
    def grid(self) -> LineGrid:
        return self.values.grid

    @property
    def smooth(self) -> bool:
        """``False`` for the sharp indicator, which consumers needing smoothness reject"""
        return self.sigma > 0


def _bump(x: np.ndarray) -> np.ndarray:
    """Unnormalized ``exp(-1/(1-x²))`` on ``(-1, 1)``, zero elsewhere"""
    out = np.zeros_like(x, dtype=float)
    inside = np.abs(x) < 1
    out[inside] = np.exp(-1 / (1 - x[inside] ** 2))
    return out


def _normalize(values: np.ndarray, grid: LineGrid) -> np.ndarray:
    mass = grid.dx * np.sum(values)
    if mass <= 0:
        raise PreconditionError("Mollifier has no mass on this grid")
    return values / mass


def bump_mollifier(grid: LineGrid) -> SampledFunction1D:
    """The standard bump on ``(-1, 1)``, normalized to unit mass by grid quadrature"""
    if not grid.contains(-1.0, 1.0):
        raise PreconditionError(
            f"Grid [{grid.x_min}, {grid.x_max}) does not span the bump support (-1, 1)"
        )
    return SampledFunction1D(grid=grid, values=_normalize(_bump(grid.points), grid))


def _check_resolved(sigma: float, grid: LineGrid) -> None:
    if sigma < MIN_MOLLIFIER_POINTS * grid.dx:
        raise PreconditionError(
            f"mollifier under-resolved: sigma={sigma:g} < {MIN_MOLLIFIER_POINTS}*dx="
            f"{MIN_MOLLIFIER_POINTS * grid.dx:g}"
        )


def scaled_mollifier(omega: SampledFunction1D, sigma: float) -> SampledFunction1D:
    """
    ``omega(x/sigma)/sigma`` resampled on ``omega``'s grid by monotone cubic interpolation,
    with its mass renormalized to one.
    """
    grid = omega.grid
    _check_resolved(sigma, grid)
    interp = PchipInterpolator(grid.points, omega.real, extrapolate=False)
    values = np.nan_to_num(interp(grid.points / sigma), nan=0.0)
    values = np.clip(values, 0, None)
    return omega.with_values(_normalize(values, grid))


def _analytic_scaled_bump(grid: LineGrid, sigma: float) -> np.ndarray:
    return _normalize(_bump(grid.points / sigma), grid)


def smooth_indicator(
    E: IntervalSet,
    sigma: float,
    grid: LineGrid,
    omega: SampledFunction1D | None = None,
) -> SmoothIndicator:
    """
    ``u_{E,sigma} = omega_sigma * chi_E``.

    Args:
        E: the interval
        sigma: mollifier radius, 0 for the sampled indicator
        grid: sampling grid, must contain ``[alpha - sigma, beta + sigma]``
        omega: custom unit-mass mollifier on ``grid`` with support in ``(-1, 1)``.
            The analytic standard bump when ``None``.

    Mass is preserved exactly by the discrete convolution, so ``integral u = beta - alpha``
    holds to rounding when the endpoints are grid nodes.
    """
    if sigma < 0:
        raise PreconditionError(f"sigma must be nonnegative, got {sigma}")
    lo, hi = E.alpha - sigma, E.beta + sigma
    if not grid.contains(lo, hi):
        raise PreconditionError(
            f"[{lo:g}, {hi:g}] leaves the grid [{grid.x_min:g}, {grid.x_max:g})"
        )
    chi = E.indicator(grid)
    if sigma == 0:
        return SmoothIndicator(interval=E, sigma=0.0, values=chi)

    if omega is None:
        _check_resolved(sigma, grid)
        mollifier = SampledFunction1D(grid=grid, values=_analytic_scaled_bump(grid, sigma))
    else:
        mollifier = scaled_mollifier(omega, sigma)

    u = convolve_1d(chi, mollifier)
    x = grid.points
    values = np.where((x >= lo) & (x <= hi), u.values.real, 0.0)
    values = np.clip(values, 0.0, 1.0)
    return SmoothIndicator(interval=E, sigma=sigma, values=u.with_values(values))


def gaussian_window_log(E: IntervalSet, grid: LineGrid) -> SampledFunction1D:
    """
    ``log a(x)`` for ``a(x) = integral_alpha^beta exp(-(t - x)²) dt``.

    Uses ``a = sqrt(pi)/2 * (erfc(z - h) - erfc(z + h))`` with ``z = |x - mid|``,
    ``h = width/2``, evaluated in log space so the far tails stay finite.
    """
    z = np.abs(grid.points - E.midpoint)
    h = E.width / 2
    le1 = _log_erfc(z - h)
    le2 = _log_erfc(z + h)
    values = _LOG_HALF_SQRT_PI + le1 + np.log1p(-np.exp(le2 - le1))
    return SampledFunction1D(grid=grid, values=values)


def _log_erfc(t: np.ndarray) -> np.ndarray:
    return math.log(2) + scipy.special.log_ndtr(-t * math.sqrt(2))


def gaussian_window_closed_form(E: IntervalSet, grid: LineGrid) -> SampledFunction1D:
    """
    The Gaussian window ``a(x) = integral_alpha^beta exp(-(t - x)²) dt``.

    Strictly positive, maximal at the midpoint, bounded by ``beta - alpha``.
    Underflows to zero far in the tails; use :func:`.gaussian_window_log` there.
    """
    log_a = gaussian_window_log(E, grid)
    return log_a.with_values(np.exp(log_a.real))


def indicator_convolution(E: IntervalSet, g: SampledFunction1D) -> SampledFunction1D:
    """
    ``(chi_E * g)(x) = integral_alpha^beta g(x - t) dt`` with exact endpoints.

    ``g`` is split into a Gaussian of the same mass, whose interval integral is the closed
    form window, plus a zero-mass remainder ``r``, integrated through its spectral
    antiderivative ``R``: ``chi_E * g = M a(x)/sqrt(pi) + R(x - alpha) - R(x - beta)``.
    Endpoints need not be grid nodes.
    """
    grid = g.grid
    x = grid.points
    mass = g.integral()
    reference = np.exp(-(x**2)) / math.sqrt(math.pi)
    remainder = g.with_values(g.values - mass * reference)
    R = antiderivative(remainder)
    shifted = translate_rows(R, np.array([E.alpha, E.beta]))
    window = gaussian_window_closed_form(E, grid).real
    values = mass * window / math.sqrt(math.pi) + shifted[0] - shifted[1]
    if g.is_real:
        values = values.real
    return g.with_values(values)
