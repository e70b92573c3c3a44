import numpy as np
import pytest

from whquant import (
    Apodization,
    ApodizationKind,
    PhaseGrid,
    PreconditionError,
    convolve_1d,
    displacement_matrix,
    make_line_grid,
    preset_state,
    pure_state_apodization,
    reflect,
    validate_assumptions,
    wigner_function,
)
from whquant.apodization import coherent_state
from whquant.states import normalize


@pytest.fixture(scope="module")
def small_line():
    return make_line_grid(-8, 8, 256)


@pytest.fixture(scope="module")
def small_phase(small_line):
    return PhaseGrid.from_line(small_line)


@pytest.fixture(scope="module")
def hermite_apod(small_line, small_phase) -> Apodization:
    return pure_state_apodization(normalize(preset_state("hermite_1", small_line)), small_phase)


def test_gaussian_pi(gaussian_apod):
    q, p = gaussian_apod.phase_grid.mesh()
    expected = np.exp(-(q**2 + p**2) / 4)
    assert np.max(np.abs(gaussian_apod.pi_values.values - expected)) < 1e-8
    assert gaussian_apod.kind == ApodizationKind.pure_state
    assert gaussian_apod.even


def test_gaussian_profiles(gaussian_apod):
    x = gaussian_apod.line_grid.points
    assert np.max(np.abs(gaussian_apod.gamma.values - np.exp(-(x**2)) / np.sqrt(np.pi))) < 1e-8
    p = gaussian_apod.varpi.grid.points
    assert np.max(np.abs(gaussian_apod.varpi.values - np.exp(-(p**2)) / np.sqrt(np.pi))) < 1e-8
    assert gaussian_apod.gamma.integral() == pytest.approx(1, abs=1e-10)


def test_pi_symmetry(gaussian_apod, hermite_apod):
    """``Pi(-q, -p) = conj(Pi(q, p))``; the unpaired first node rows only match up to wrap"""
    for apod in (gaussian_apod, hermite_apod):
        pi = apod.pi_values
        diff = reflect(pi).values - pi.values.conj()
        assert np.max(np.abs(diff[1:, 1:])) < 1e-8
        assert np.max(np.abs(pi.values)) <= 1 + 1e-8
    even = gaussian_apod.pi_values
    assert np.max(np.abs(reflect(even).values - even.values)) < 1e-8


def test_weyl(weyl_apod):
    assert weyl_apod.is_weyl
    assert np.all(weyl_apod.pi_values.values == 1)
    assert weyl_apod.gamma.integral() == pytest.approx(1, abs=1e-12)
    grid = weyl_apod.line_grid
    u = np.exp(-((grid.points - 1) ** 2))
    smeared = convolve_1d(weyl_apod.gamma.with_values(u), weyl_apod.gamma)
    assert np.max(np.abs(smeared.values - u)) < 1e-12


def test_unnormalized_fiducial(small_line, small_phase):
    psi = normalize(preset_state("gaussian_ground", small_line))
    with pytest.raises(PreconditionError):
        pure_state_apodization(psi.with_values(2 * psi.values), small_phase)


def test_wigner_gaussian(small_line, small_phase):
    psi = normalize(preset_state("gaussian_ground", small_line))
    W = wigner_function(psi, small_phase)
    q, p = small_phase.mesh()
    assert np.max(np.abs(W.values - np.exp(-(q**2) - p**2) / np.pi)) < 1e-8
    assert np.min(W.values.real) >= -1e-9
    assert W.integral().real == pytest.approx(1, abs=1e-6)


def test_wigner_hermite_negative(small_line, small_phase):
    psi = normalize(preset_state("hermite_1", small_line))
    W = wigner_function(psi, small_phase)
    origin = W.values[small_phase.q_axis.index_of(0), small_phase.p_axis.index_of(0)]
    assert origin.real == pytest.approx(-1 / np.pi, abs=1e-8)
    assert W.integral().real == pytest.approx(1, abs=1e-6)


def test_displacement_identity(small_line):
    U = displacement_matrix(small_line, 0, 0)
    assert np.allclose(U.matrix, np.eye(small_line.n), rtol=0, atol=1e-15)


@pytest.mark.parametrize(
    "q,p",
    [
        pytest.param(1.0, 0.5, id="node-shift"),
        pytest.param(0.37, -1.2, id="off-node-shift"),
        pytest.param(-2.0, 3.0, id="large-momentum"),
    ],
)
def test_displacement_unitary(small_line, q, p):
    U = displacement_matrix(small_line, q, p)
    eye = np.eye(small_line.n)
    assert np.max(np.abs(U.matrix.conj().T @ U.matrix - eye)) < 1e-8
    inverse = displacement_matrix(small_line, -q, -p)
    assert np.max(np.abs(U.adjoint().matrix - inverse.matrix)) < 1e-10


def test_displacement_action(packets):
    """``(U(q, p) phi)(x) = exp(i p x - i q p / 2) phi(x - q)``"""
    grid = packets[0].grid
    q, p = 1.0, 0.75
    U = displacement_matrix(grid, q, p)
    x = grid.points
    # packet 0 is the normalized ground state, known in closed form
    moved = U.apply(packets[0]).values
    expected = np.exp(1j * p * x - 0.5j * q * p) * np.pi**-0.25 * np.exp(-((x - q) ** 2) / 2)
    assert np.max(np.abs(moved - expected)) < 1e-10


def test_displacement_composition(packets):
    grid = packets[0].grid
    (q1, p1), (q2, p2) = (0.7, -0.4), (-1.1, 0.9)
    composed = displacement_matrix(grid, q1, p1) @ displacement_matrix(grid, q2, p2)
    phase = np.exp(-0.5j * (q1 * p2 - p1 * q2))
    joint = displacement_matrix(grid, q1 + q2, p1 + p2)
    for psi in packets:
        lhs = composed.apply(psi).values
        rhs = phase * joint.apply(psi).values
        assert np.max(np.abs(lhs - rhs)) < 1e-7


def test_coherent_state(gaussian_apod, weyl_apod):
    state = coherent_state(gaussian_apod, 1.5, -0.5)
    assert state.norm() == pytest.approx(1, abs=1e-12)
    with pytest.raises(PreconditionError):
        coherent_state(weyl_apod, 0, 0)


def test_assumptions_gaussian(gaussian_apod):
    report = validate_assumptions(gaussian_apod)
    assert report.all_passed
    assert not report.distributional
    assert report == gaussian_apod.assumption_report


def test_assumptions_weyl(weyl_apod):
    report = validate_assumptions(weyl_apod)
    assert not report.all_passed
    assert report.distributional


def test_assumptions_hermite(hermite_apod):
    report = hermite_apod.assumption_report
    assert not report.a1_nonneg_fs.passed
    assert report.a1_nonneg_fs.extremum < 0
