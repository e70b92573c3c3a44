import logging
import math

import numpy as np
import pytest

from whquant import (
    IntervalSet,
    NotHermitianError,
    OperatorMatrix,
    PreconditionError,
    SampledFunction1D,
    compare_spectra,
    smooth_indicator,
    spectrum,
    weighted_operator,
    well_reference_spectrum,
)


@pytest.fixture(scope="module")
def smooth_weight(medium_grid, interval) -> SampledFunction1D:
    return smooth_indicator(interval, 0.4, medium_grid).values


@pytest.mark.parametrize("kind", ["momentum", "kinetic"])
@pytest.mark.parametrize("scheme", ["spectral", "central_diff"])
def test_hermitian(smooth_weight, kind, scheme):
    op = weighted_operator(smooth_weight, kind, scheme=scheme)
    assert op.matrix.hermitian
    assert op.matrix.hermitian_residual < 1e-10
    assert op.a_max == pytest.approx(1)


def test_weight_scaling(smooth_weight):
    """Doubling the weight scales every eigenvalue by four"""
    single = weighted_operator(smooth_weight, "kinetic", scheme="central_diff")
    double = weighted_operator(
        smooth_weight.with_values(2 * smooth_weight.values), "kinetic", scheme="central_diff"
    )
    base = spectrum(single.matrix, k=5).eigenvalues
    scaled = spectrum(double.matrix, k=5).eigenvalues
    assert np.allclose(scaled, 4 * base, rtol=1e-10, atol=1e-8)


@pytest.mark.parametrize(
    "values",
    [
        pytest.param(lambda x: np.exp(-(x**2)) * (1 + 0.1j), id="complex"),
        pytest.param(lambda x: np.exp(-(x**2)) - 0.5, id="negative"),
    ],
)
def test_invalid_weight(medium_grid, values):
    a = SampledFunction1D.from_callable(medium_grid, values)
    with pytest.raises(PreconditionError):
        weighted_operator(a, "momentum")


def test_spectrum_subset(smooth_weight):
    op = weighted_operator(smooth_weight, "kinetic", scheme="central_diff").matrix
    full = spectrum(op)
    lowest = spectrum(op, k=4)
    assert lowest.eigenvalues.shape == (4,)
    assert np.allclose(lowest.eigenvalues, full.eigenvalues[:4], atol=1e-8)
    assert np.all(full.residuals < 1e-8)


def test_spectrum_eigenvectors(medium_grid):
    one = SampledFunction1D(grid=medium_grid, values=np.ones(medium_grid.n))
    result = spectrum(weighted_operator(one, "kinetic", scheme="central_diff").matrix, k=6)
    gram = medium_grid.dx * result.eigenvectors.conj().T @ result.eigenvectors
    assert np.allclose(gram, np.eye(6), atol=1e-10)
    assert np.all(result.eigenvalues > 0)


def test_spectrum_not_hermitian(medium_grid):
    M = OperatorMatrix.from_matrix(medium_grid, np.triu(np.ones((medium_grid.n,) * 2)))
    with pytest.raises(NotHermitianError):
        spectrum(M)


def test_well_reference(interval):
    levels = well_reference_spectrum(interval, 3)
    assert np.allclose(levels, [(n * math.pi / 2) ** 2 for n in (1, 2, 3)])
    with pytest.raises(PreconditionError):
        well_reference_spectrum(interval, 0)


def test_compare_sharp_well(medium_grid, interval):
    """The sharp weight with central differences is the Dirichlet well on the nodes of E"""
    sharp = smooth_indicator(interval, 0, medium_grid).values
    family = {"sharp": weighted_operator(sharp, "kinetic", scheme="central_diff")}
    result = compare_spectra(family, interval, k=3)

    assert [row.level for row in result.rows] == [1, 2, 3]
    for row in result.rows:
        assert row.sharpness == "sharp"
        assert row.mass_in_set == pytest.approx(1, abs=1e-10)
        # the discrete well is one cell wider than E
        assert -0.05 < row.relative_gap < 0
    assert result.trend_monotone
    assert not result.flags


def test_compare_sweep(medium_grid, interval):
    family = {
        f"sigma={sigma}": weighted_operator(
            smooth_indicator(interval, sigma, medium_grid).values, "kinetic", scheme="central_diff"
        )
        for sigma in (0.4, 0.2, 0.0)
    }
    result = compare_spectra(family, interval, k=2)
    assert {row.sharpness for row in result.rows} <= set(family)
    assert all(row.mass_in_set >= 0.5 for row in result.rows)


def test_compare_flags_trend(medium_grid, interval, caplog):
    """Doubling the weight quadruples the levels, so the ground gap jumps and comes back"""
    sharp = smooth_indicator(interval, 0, medium_grid).values
    family = {
        label: weighted_operator(
            sharp.with_values(scale * sharp.values), "kinetic", scheme="central_diff"
        )
        for label, scale in (("sharp", 1.0), ("doubled", 2.0), ("sharp again", 1.0))
    }
    with caplog.at_level(logging.WARNING, logger="whquant.analysis.weighted"):
        result = compare_spectra(family, interval, k=1)

    assert not result.trend_monotone
    (flag,) = result.flags
    assert "ground level" in flag
    assert flag.index("sharp:") < flag.index("doubled:") < flag.index("sharp again:")
    assert any("not monotone" in r.getMessage() for r in caplog.records)


def test_compare_rejects_momentum(smooth_weight, interval):
    family = {"smooth": weighted_operator(smooth_weight, "momentum")}
    with pytest.raises(PreconditionError):
        compare_spectra(family, interval)
