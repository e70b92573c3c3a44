import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.special import erf

from whquant import (
    IntervalSet,
    LineGrid,
    PreconditionError,
    SampledFunction1D,
    bump_mollifier,
    derivative,
    gaussian_window_closed_form,
    gaussian_window_log,
    make_line_grid,
    scaled_mollifier,
    smooth_indicator,
)
from whquant.mollifiers import indicator_convolution


def _erf_window(x: np.ndarray, E: IntervalSet) -> np.ndarray:
    return math.sqrt(math.pi) / 2 * (erf(E.beta - x) - erf(E.alpha - x))


def test_interval_ordered():
    with pytest.raises(ValidationError):
        IntervalSet(alpha=2.0, beta=2.0)


def test_interval_mask_half_open(medium_grid: LineGrid, interval: IntervalSet):
    chi = interval.indicator(medium_grid)
    assert chi.integral().real == pytest.approx(interval.width, abs=1e-12)
    assert chi.values[medium_grid.index_of(0.0)] == 1
    assert chi.values[medium_grid.index_of(2.0)] == 0
    assert interval.on_grid(medium_grid)
    assert not IntervalSet(alpha=0.01, beta=2).on_grid(medium_grid)


def test_bump():
    grid = make_line_grid(-2, 2, 256)
    omega = bump_mollifier(grid)
    assert omega.integral().real == pytest.approx(1, abs=1e-12)
    outside = np.abs(grid.points) >= 1
    assert not np.any(omega.values[outside])
    assert np.argmax(omega.values.real) == grid.index_of(0)


def test_bump_needs_support():
    with pytest.raises(PreconditionError):
        bump_mollifier(make_line_grid(-0.5, 0.5, 16))


@pytest.mark.parametrize("sigma", [pytest.param(0.5, id="0.5"), pytest.param(0.1, id="0.1")])
def test_scaled_mollifier(sigma):
    grid = make_line_grid(-2, 2, 1024)
    scaled = scaled_mollifier(bump_mollifier(grid), sigma)
    assert scaled.integral().real == pytest.approx(1, abs=1e-12)
    assert not np.any(scaled.values[np.abs(grid.points) >= sigma + grid.dx])


def test_scaled_mollifier_identity():
    grid = make_line_grid(-2, 2, 256)
    omega = bump_mollifier(grid)
    assert np.max(np.abs(scaled_mollifier(omega, 1.0).values - omega.values)) < 1e-12


def test_mollifier_under_resolved():
    grid = make_line_grid(-2, 2, 64)
    with pytest.raises(PreconditionError, match="under-resolved"):
        scaled_mollifier(bump_mollifier(grid), 0.1)
    with pytest.raises(PreconditionError, match="under-resolved"):
        smooth_indicator(IntervalSet(alpha=0, beta=1), 0.1, grid)


def test_sharp_indicator(medium_grid, interval):
    u = smooth_indicator(interval, 0, medium_grid)
    assert not u.smooth
    assert np.array_equal(u.values.values, interval.indicator(medium_grid).values)


@pytest.mark.parametrize(
    "sigma", [pytest.param(0.4, id="0.4"), pytest.param(0.2, id="0.2"), pytest.param(0.1, id="0.1")]
)
def test_smooth_indicator(fine_grid, interval, sigma):
    u = smooth_indicator(interval, sigma, fine_grid)
    values = u.values.values.real
    x = fine_grid.points
    assert u.smooth
    assert np.all((values >= 0) & (values <= 1))
    assert u.values.integral().real == pytest.approx(interval.width, abs=1e-10)

    distance = np.minimum(np.abs(x - interval.alpha), np.abs(x - interval.beta))
    far = distance > 2 * sigma
    chi = interval.indicator(fine_grid).values.real
    assert np.max(np.abs(values[far] - chi[far])) <= 1e-12
    assert values[fine_grid.index_of(1.0)] == pytest.approx(1, abs=1e-12)


def test_smooth_indicator_custom_mollifier(fine_grid, interval):
    omega = bump_mollifier(fine_grid)
    custom = smooth_indicator(interval, 0.2, fine_grid, omega=omega)
    analytic = smooth_indicator(interval, 0.2, fine_grid)
    assert np.max(np.abs(custom.values.values - analytic.values.values)) < 1e-2
    assert custom.values.integral().real == pytest.approx(interval.width, abs=1e-10)


def test_smooth_indicator_leaves_grid(medium_grid):
    with pytest.raises(PreconditionError):
        smooth_indicator(IntervalSet(alpha=6, beta=7.9), 0.2, medium_grid)
    with pytest.raises(PreconditionError):
        smooth_indicator(IntervalSet(alpha=0, beta=1), -0.1, medium_grid)


def test_gaussian_window(line_grid, interval):
    a = gaussian_window_closed_form(interval, line_grid)
    x = line_grid.points
    values = a.values.real
    assert np.argmax(values) == line_grid.index_of(interval.midpoint)
    assert values.max() == pytest.approx(math.sqrt(math.pi) * erf(1), abs=1e-10)
    assert np.all(values <= interval.width)
    assert np.all(values[np.abs(x - 1) < 10] > 0)
    near = np.abs(x - 1) < 4
    assert np.allclose(values[near], _erf_window(x[near], interval), rtol=1e-9, atol=0)


def test_gaussian_window_derivative(line_grid, interval):
    """``a'(x) = exp(-(x - alpha)²) - exp(-(x - beta)²)``"""
    a = gaussian_window_closed_form(interval, line_grid)
    x = line_grid.points
    expected = np.exp(-((x - interval.alpha) ** 2)) - np.exp(-((x - interval.beta) ** 2))
    assert np.max(np.abs(derivative(a).values - expected)) < 1e-6


def test_gaussian_window_log_tails():
    grid = make_line_grid(-64, 64, 1024)
    E = IntervalSet(alpha=0, beta=2)
    log_a = gaussian_window_log(E, grid)
    assert np.all(np.isfinite(log_a.values.real))
    far = grid.index_of(60.0)
    # exp(-58²) underflows, its logarithm does not
    assert gaussian_window_closed_form(E, grid).values[far] == 0
    assert log_a.values.real[far] == pytest.approx(-(58**2), rel=1e-2)


def test_indicator_convolution_gaussian(line_grid, interval):
    gamma = SampledFunction1D.from_callable(line_grid, lambda x: np.exp(-(x**2)) / np.sqrt(np.pi))
    out = indicator_convolution(interval, gamma)
    expected = gaussian_window_closed_form(interval, line_grid).values.real / math.sqrt(math.pi)
    assert np.max(np.abs(out.values - expected)) < 1e-8


@pytest.mark.parametrize(
    "E",
    [
        pytest.param(IntervalSet(alpha=0, beta=2), id="node-endpoints"),
        pytest.param(IntervalSet(alpha=0.03, beta=2.01), id="off-node-endpoints"),
    ],
)
def test_indicator_convolution_shifted_gaussian(line_grid, E):
    mu, s = 0.3, 0.4
    g = SampledFunction1D.from_callable(
        line_grid, lambda x: np.exp(-((x - mu) ** 2) / (2 * s**2)) / (s * math.sqrt(2 * math.pi))
    )
    out = indicator_convolution(E, g)
    x = line_grid.points
    scale = s * math.sqrt(2)
    expected = (erf((x - E.alpha - mu) / scale) - erf((x - E.beta - mu) / scale)) / 2
    assert np.max(np.abs(out.values - expected)) < 1e-8
