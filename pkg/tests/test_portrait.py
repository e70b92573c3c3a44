import numpy as np
import pytest

from whquant import (
    GridMismatchError,
    OperatorMatrix,
    PreconditionError,
    SampledFunction2D,
    kernel,
    portrait_convolution,
    portrait_trace,
    quantize_u_pn,
    smooth_indicator,
)
from whquant.portrait import autocorrelation_kernel, coordinate_shifts
from whquant.types import PortraitPath

POINTS = [(0.0, 0.0), (1.0, 0.5), (-2.0, 1.5), (0.5, -3.0)]


def _gaussian(q: np.ndarray, p: np.ndarray) -> np.ndarray:
    return np.exp(-(q**2 + p**2) / 2)


def _smoothed_gaussian(q, p):
    """The Gaussian observable convolved with the Gaussian autocorrelation kernel"""
    return np.exp(-(np.asarray(q) ** 2 + np.asarray(p) ** 2) / 4) / 2


@pytest.fixture(scope="module")
def gaussian_observable(portrait_apod) -> SampledFunction2D:
    return SampledFunction2D.from_callable(portrait_apod.phase_grid, _gaussian)


def test_autocorrelation_gaussian(portrait_apod):
    k = autocorrelation_kernel(portrait_apod)
    q, p = k.grid.mesh()
    expected = np.exp(-(q**2 + p**2) / 2) / (2 * np.pi)
    assert np.max(np.abs(k.values - expected)) < 1e-10
    assert k.integral() == pytest.approx(1, abs=1e-10)
    assert k is portrait_apod.autocorrelation


def test_convolution_form(portrait_apod, gaussian_observable):
    portrait = portrait_convolution(gaussian_observable, portrait_apod)
    assert portrait.path == PortraitPath.convolution_form
    assert portrait.kernel_min >= -1e-12
    q, p = portrait.values.grid.mesh()
    assert np.max(np.abs(portrait.values.values - _smoothed_gaussian(q, p))) < 1e-8


def test_trace_matches_convolution(portrait_apod, gaussian_observable):
    A = kernel(gaussian_observable, portrait_apod)
    traced = portrait_trace(A, portrait_apod, POINTS, grid=portrait_apod.phase_grid)
    assert traced.path == PortraitPath.trace_form
    convolved = portrait_convolution(gaussian_observable, portrait_apod)
    expected = np.array([_smoothed_gaussian(q, p) for q, p in POINTS])
    assert np.max(np.abs(traced.samples - expected)) < 1e-6
    assert np.max(np.abs(convolved.sample(POINTS) - expected)) < 1e-4


def test_identity_portrait(portrait_apod):
    identity = OperatorMatrix.identity(portrait_apod.line_grid)
    portrait = portrait_trace(identity, portrait_apod, POINTS)
    assert np.allclose(portrait.samples, 1, atol=1e-12)


def test_window_portrait(portrait_apod, interval):
    """A position-only observable has a position-only portrait"""
    u = smooth_indicator(interval, 0.5, portrait_apod.line_grid).values.values.real
    f = SampledFunction2D(
        grid=portrait_apod.phase_grid,
        values=np.repeat(u[:, None], portrait_apod.phase_grid.shape[1], axis=1),
    )
    values = portrait_convolution(f, portrait_apod).values.values
    assert np.max(np.abs(values - values[:, :1])) < 1e-10


def test_window_operator_trace_portrait(portrait_apod, interval):
    """The portrait of a window operator does not depend on p and stays near E"""
    u = smooth_indicator(interval, 0.5, portrait_apod.line_grid)
    W = quantize_u_pn(u, 0, portrait_apod)
    points = [(1.0, -2.0), (1.0, 0.0), (1.0, 2.0), (7.0, 0.0)]
    samples = portrait_trace(W, portrait_apod, points).samples
    assert np.max(np.abs(samples[:3] - samples[1])) < 1e-8
    assert samples[1] > 0.5
    assert samples[3] < 1e-3


def test_coordinate_shifts(portrait_apod, weyl_apod):
    q0, p0 = coordinate_shifts(portrait_apod)
    assert abs(q0) < 1e-10
    assert abs(p0) < 1e-10
    assert coordinate_shifts(weyl_apod) == (0.0, 0.0)


def test_weyl(weyl_apod):
    f = SampledFunction2D.from_callable(weyl_apod.phase_grid, _gaussian)
    portrait = portrait_convolution(f, weyl_apod)
    assert portrait.values is f
    with pytest.raises(PreconditionError):
        portrait_trace(OperatorMatrix.identity(weyl_apod.line_grid), weyl_apod, POINTS)


def test_trace_sampling(portrait_apod):
    identity = OperatorMatrix.identity(portrait_apod.line_grid)
    portrait = portrait_trace(identity, portrait_apod, POINTS)
    assert portrait.sample([POINTS[1]]) == pytest.approx([1])
    with pytest.raises(PreconditionError):
        portrait.sample([(0.25, 0.25)])


def test_points_outside_grid(portrait_apod):
    identity = OperatorMatrix.identity(portrait_apod.line_grid)
    with pytest.raises(PreconditionError):
        portrait_trace(identity, portrait_apod, [(20.0, 0.0)], grid=portrait_apod.phase_grid)


def test_grid_mismatch(portrait_apod, gaussian_apod):
    f = SampledFunction2D.from_callable(gaussian_apod.phase_grid, _gaussian)
    with pytest.raises(GridMismatchError):
        portrait_convolution(f, portrait_apod)
    with pytest.raises(GridMismatchError):
        portrait_trace(OperatorMatrix.identity(gaussian_apod.line_grid), portrait_apod, POINTS)
