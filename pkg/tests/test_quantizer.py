import math

import numpy as np
import pytest

from whquant import (
    IntervalSet,
    KernelPathUnavailable,
    OperatorMatrix,
    SampledFunction1D,
    SampledFunction2D,
    UnsupportedOrderError,
    coefficient_profiles,
    commutator,
    deformed_ccr_profile,
    displacement_matrix,
    fourier_1d,
    gaussian_window_closed_form,
    kernel,
    quantize_momentum_function,
    quantize_u_pn,
    smooth_indicator,
    trace_check,
    truncated_observables,
    window_fourier,
    window_function,
)
from whquant.quantizer import momentum_symbol, window_root


def _gaussian_observable(q0: float = 0.0, p0: float = 0.0):
    return lambda q, p: np.exp(-((q - q0) ** 2 + (p - p0) ** 2) / 2)


def _max_action_error(A: OperatorMatrix, B: OperatorMatrix, states) -> float:
    return max(float(np.max(np.abs(A.apply(s).values - B.apply(s).values))) for s in states)


@pytest.fixture(scope="module")
def gaussian_kernel(gaussian_apod) -> tuple[SampledFunction2D, OperatorMatrix]:
    f = SampledFunction2D.from_callable(gaussian_apod.phase_grid, _gaussian_observable())
    return f, kernel(f, gaussian_apod)


def test_identity(gaussian_apod, packets):
    """``f = 1`` quantizes to the identity"""
    one = SampledFunction2D(
        grid=gaussian_apod.phase_grid, values=np.ones(gaussian_apod.phase_grid.shape)
    )
    A = kernel(one, gaussian_apod)
    for psi in packets:
        assert np.max(np.abs(A.apply(psi).values - psi.values)) < 1e-6
    assert A.hermitian


def test_trace(gaussian_kernel):
    f, A = gaussian_kernel
    check = trace_check(A, f)
    assert check.rhs == pytest.approx(1, abs=1e-10)
    assert check.lhs == pytest.approx(1, abs=1e-4)
    assert check.abs_err < 1e-4


def test_trace_vanishes_for_odd_observable(portrait_apod):
    f = SampledFunction2D.from_callable(
        portrait_apod.phase_grid, lambda q, p: q * np.exp(-(q**2 + p**2) / 2)
    )
    check = trace_check(kernel(f, portrait_apod), f)
    assert abs(check.rhs) < 1e-10
    assert abs(check.lhs) < 1e-8


def test_kernel_hermitian_for_real_observable(gaussian_kernel):
    _, A = gaussian_kernel
    assert A.hermitian


def test_covariance(gaussian_apod, gaussian_kernel, packets):
    """The quantized translate of ``f`` is ``U A_f U^H``"""
    _, A = gaussian_kernel
    grid = gaussian_apod.line_grid
    q0, p0 = 1.0, 5 * grid.dp
    shifted = SampledFunction2D.from_callable(
        gaussian_apod.phase_grid, _gaussian_observable(q0, p0)
    )
    A_shifted = kernel(shifted, gaussian_apod)
    U = displacement_matrix(grid, q0, p0)
    assert _max_action_error(A_shifted, U @ A @ U.adjoint(), packets) < 1e-5


def test_window_closed_form(gaussian_apod, interval):
    u = smooth_indicator(interval, 0, gaussian_apod.line_grid)
    w = window_function(u, gaussian_apod)
    expected = gaussian_window_closed_form(interval, gaussian_apod.line_grid).values
    assert np.max(np.abs(w.values - expected / math.sqrt(math.pi))) < 1e-8


def test_window_weyl(weyl_apod, interval):
    u = smooth_indicator(interval, 0.5, weyl_apod.line_grid)
    assert window_function(u, weyl_apod) is u.values


@pytest.mark.parametrize(
    "sigma,tol",
    [pytest.param(0.5, 1e-10, id="smooth"), pytest.param(0.0, 1e-8, id="sharp")],
)
def test_window_fourier(gaussian_apod, interval, sigma, tol):
    u = smooth_indicator(interval, sigma, gaussian_apod.line_grid)
    direct = fourier_1d(window_function(u, gaussian_apod))
    w_hat = window_fourier(u, gaussian_apod)
    assert w_hat.grid.matches(direct.grid)
    assert np.max(np.abs(w_hat.values - direct.values)) < tol


def test_ccr_constant_weight(gaussian_apod, packets):
    """``u = 1`` gives back ``[Q, P] = i``"""
    grid = gaussian_apod.line_grid
    one = SampledFunction1D(grid=grid, values=np.ones(grid.n))
    profiles = coefficient_profiles(one, gaussian_apod)
    assert np.max(np.abs(profiles.w.values - 1)) < 1e-12
    assert np.max(np.abs(profiles.b.values)) < 1e-12
    assert np.max(np.abs(profiles.e)) < 1e-10

    A_q = OperatorMatrix.diagonal(grid.points * profiles.w.values + profiles.b.values, grid)
    A_p = quantize_u_pn(one, 1, gaussian_apod)
    C = commutator(A_q, A_p)
    for psi in packets:
        assert np.max(np.abs(C.apply(psi).values - 1j * psi.values)) < 1e-6


def test_deformed_ccr(medium_apod, medium_states, interval):
    obs = truncated_observables(interval, 0.2, medium_apod)
    C = commutator(obs.a_q, obs.a_p)
    profile = deformed_ccr_profile(obs.profiles).values
    for psi in medium_states:
        assert np.max(np.abs(C.apply(psi).values - profile * psi.values)) < 1e-5


def test_truncated_hermitian(medium_apod, interval):
    obs = truncated_observables(interval, 0.2, medium_apod)
    assert obs.a_q.hermitian
    assert obs.a_p.hermitian
    assert obs.a_p2.hermitian
    assert obs.profiles.path == "pure_state"


@pytest.mark.parametrize("power", [pytest.param(1, id="u-p"), pytest.param(2, id="u-p2")])
def test_kernel_matches_profiles(medium_apod, medium_states, interval, power):
    """Both quantization routes give the same operator on decaying states"""
    u = smooth_indicator(interval, 0.2, medium_apod.line_grid)
    weights = u.values.values.real

    def _observable(q: np.ndarray, p: np.ndarray) -> np.ndarray:
        return weights[:, None] * p**power

    f = SampledFunction2D.from_callable(medium_apod.phase_grid, _observable)
    from_kernel = kernel(f, medium_apod)
    from_profiles = quantize_u_pn(u, power, medium_apod)
    assert _max_action_error(from_kernel, from_profiles, medium_states) < 1e-5


def test_window_operator(medium_apod, interval):
    u = smooth_indicator(interval, 0.2, medium_apod.line_grid)
    W = quantize_u_pn(u, 0, medium_apod)
    w = window_function(u, medium_apod)
    assert np.allclose(np.diag(W.matrix), w.values)
    root = window_root(u, medium_apod)
    assert np.allclose((root @ root).matrix, W.matrix, atol=1e-14)


def test_unsupported_order(medium_apod, interval):
    u = smooth_indicator(interval, 0.2, medium_apod.line_grid)
    with pytest.raises(UnsupportedOrderError):
        quantize_u_pn(u, 3, medium_apod)


def test_weyl_profiles(weyl_apod, packets):
    u = smooth_indicator(IntervalSet(alpha=-1, beta=1), 0.5, weyl_apod.line_grid)
    profiles = coefficient_profiles(u, weyl_apod)
    assert profiles.path == "weyl_closed_form"
    assert not np.any(profiles.e)
    A_p = quantize_u_pn(u, 1, weyl_apod)
    assert A_p.hermitian
    assert quantize_u_pn(u, 2, weyl_apod).hermitian


def test_weyl_kernel(weyl_apod):
    grid = weyl_apod.phase_grid
    only_q = SampledFunction2D.from_callable(grid, lambda q, p: np.exp(-(q**2)) + 0 * p)
    A = kernel(only_q, weyl_apod)
    assert np.allclose(np.diag(A.matrix), np.exp(-(grid.q_axis.points**2)))

    with_p = SampledFunction2D.from_callable(grid, _gaussian_observable())
    with pytest.raises(KernelPathUnavailable):
        kernel(with_p, weyl_apod)


def test_momentum_function(gaussian_apod, weyl_apod):
    """``p²`` smeared by ``varpi = exp(-p²)/sqrt(pi)`` is ``p² + 1/2``"""
    momenta = gaussian_apod.varpi.grid
    v = SampledFunction1D.from_callable(momenta, lambda p: p**2)
    symbol = momentum_symbol(v, gaussian_apod)
    p = momenta.points
    inner = np.abs(p) < 20
    assert np.max(np.abs(symbol.values[inner] - (p[inner] ** 2 + 0.5))) < 1e-8
    assert momentum_symbol(v, weyl_apod) is v
    assert quantize_momentum_function(v, gaussian_apod).hermitian
