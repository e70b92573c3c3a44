"""
Semiclassical portraits (lower symbols) of quantized observables.

The trace form evaluates ``<q,p| A |q,p>`` on coherent states; the convolution form
smooths the original observable with the autocorrelation kernel of the apodization.
Both agree for observables quantized with the same apodization.
"""

import logging
from collections.abc import Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from whquant.apodization import Apodization, coherent_state
from whquant.base import ArrayModel
from whquant.exceptions import GridMismatchError, PreconditionError
from whquant.grid import PhaseGrid, SampledFunction2D
from whquant.operator import OperatorMatrix
from whquant.transforms import convolve_2d
from whquant.types import ComplexArray, PortraitPath

logger = logging.getLogger(__name__)


class Portrait(ArrayModel):
    path: PortraitPath
    source: str
    """What was portrayed, for the manifest"""
    values: SampledFunction2D | None = None
    """The full-grid portrait (convolution form)"""
    points: tuple[tuple[float, float], ...] = ()
    samples: ComplexArray | None = None
    """Values at ``points`` (trace form)"""
    kernel_min: float | None = None
    """Minimum of the autocorrelation kernel, which need not be a probability density"""

    def sample(self, points: Sequence[tuple[float, float]]) -> np.ndarray:
        """
        Portrait values at arbitrary ``(q, p)`` points.

        Grid portraits are interpolated (cubic, separately for real and imaginary parts);
        trace portraits can only return the points they were evaluated at.
        """
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        if self.values is None:
            assert self.samples is not None
            lookup = {pt: i for i, pt in enumerate(self.points)}
            try:
                idx = [lookup[(float(q), float(p))] for q, p in pts]
            except KeyError as e:
                raise PreconditionError(f"Trace portrait was not evaluated at {e.args[0]}") from e
            return self.samples[idx]

        grid = self.values.grid
        axes = (grid.q_axis.points, grid.p_axis.points)
        real = RegularGridInterpolator(axes, self.values.values.real, method="cubic")
        imag = RegularGridInterpolator(axes, self.values.values.imag, method="cubic")
        return real(pts) + 1j * imag(pts)


def autocorrelation_kernel(apod: Apodization) -> SampledFunction2D:
    """``(1/2pi) * dual Fs[Pi * Pi~]``, cached on the apodization"""
    return apod.autocorrelation


def coordinate_shifts(apod: Apodization) -> tuple[float, float]:
    """
    ``(q0, p0)`` such that the portraits of ``q`` and ``p`` are ``q + q0`` and ``p + p0``.

    Both vanish for an even apodization.
    """
    if apod.is_weyl:
        return 0.0, 0.0
    kernel = apod.autocorrelation
    q, p = kernel.grid.mesh()
    cell = kernel.grid.cell
    q0 = -float(np.sum(q * kernel.values.real) * cell)
    p0 = -float(np.sum(p * kernel.values.real) * cell)
    return q0, p0


def portrait_convolution(f: SampledFunction2D, apod: Apodization) -> Portrait:
    """
    ``f_check = kernel * f`` over the whole phase grid.

    ``f`` must be sampled on the apodization's phase grid, which must be self-dual
    (built with :meth:`.PhaseGrid.from_line` on a centered line).
    """
    if apod.is_weyl:
        return Portrait(
            path=PortraitPath.convolution_form, source="weyl_wigner", values=f, kernel_min=None
        )
    kernel = apod.autocorrelation
    if not kernel.grid.matches(f.grid):
        raise GridMismatchError(
            "Observable must be sampled on the apodization's self-dual phase grid"
        )
    smoothed = convolve_2d(kernel, f)
    kernel_min = float(np.min(kernel.values.real))
    if kernel_min < 0:
        logger.info("Autocorrelation kernel takes negative values, min %g", kernel_min)
    return Portrait(
        path=PortraitPath.convolution_form,
        source=apod.kind,
        values=smoothed,
        kernel_min=kernel_min,
    )


def portrait_trace(
    A: OperatorMatrix,
    apod: Apodization,
    points: Sequence[tuple[float, float]],
    grid: PhaseGrid | None = None,
) -> Portrait:
    """
    ``<q,p| A |q,p>`` at each sample point.

    Args:
        grid: when given, every point must fall inside its bounds

    Raises:
        PreconditionError: for the Weyl-Wigner kind, which has no coherent states,
            or for points outside ``grid``
    """
    if apod.is_weyl:
        raise PreconditionError("Trace portraits need a pure-state apodization")
    if not A.grid.matches(apod.line_grid):
        raise GridMismatchError("Operator is not on the apodization's line grid")
    pts = tuple((float(q), float(p)) for q, p in points)
    if grid is not None:
        q_axis, p_axis = grid.q_axis, grid.p_axis
        outside = [
            pt
            for pt in pts
            if not (q_axis.x_min <= pt[0] < q_axis.x_max and p_axis.x_min <= pt[1] < p_axis.x_max)
        ]
        if outside:
            raise PreconditionError(f"Sample points outside the phase grid: {outside}")
    samples = np.array([A.expectation(coherent_state(apod, q, p)) for q, p in pts])
    return Portrait(
        path=PortraitPath.trace_form,
        source=apod.kind,
        points=pts,
        samples=samples,
    )
