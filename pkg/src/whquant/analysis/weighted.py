"""
Weighted momentum and kinetic operators, their spectra, and the infinite well reference.

``P_a = A P A`` and ``K_a = A P² A`` with ``A = diag(a)`` are Hermitian by construction.
Scaling ``a -> c a`` scales both matrices, and so every eigenvalue of either, by ``c²``.
"""

import logging
import math
from collections.abc import Mapping
from typing import Self

import numpy as np
import scipy.linalg
from pydantic import model_validator

from whquant.base import ArrayModel
from whquant.const import CLIP_TOL, MASS_IN_SET, WEIGHTED_HERMITIAN_TOL
from whquant.exceptions import GridMismatchError, NotHermitianError, PreconditionError
from whquant.grid import LineGrid, SampledFunction1D
from whquant.mollifiers import IntervalSet
from whquant.operator import OperatorMatrix, kinetic_matrix, momentum_matrix
from whquant.types import ComplexArray, OperatorKind, RealArray, Scheme

logger = logging.getLogger(__name__)


class WeightedOperator(ArrayModel):
    a: SampledFunction1D
    kind: OperatorKind
    scheme: Scheme
    matrix: OperatorMatrix

    @model_validator(mode="after")
    def hermitian_by_construction(self) -> Self:
        residual = self.matrix.hermitian_residual
        assert residual < WEIGHTED_HERMITIAN_TOL, f"Weighted operator residual {residual:g}"
        assert np.all(self.a.values.real >= 0), "Weight must be nonnegative"
        return self

    @property
    def a_max(self) -> float:
        return float(np.max(self.a.values.real))


class SpectrumResult(ArrayModel):
    grid: LineGrid
    eigenvalues: RealArray
    eigenvectors: ComplexArray
    """Columns, normalized so that ``dx * sum |v|² = 1``"""
    residuals: RealArray
    """``||M u - lambda u||_2`` for the unit (l2) eigenvectors ``u``"""

    def mass_in(self, E: IntervalSet) -> np.ndarray:
        """Quadrature mass of each eigenvector inside ``E``"""
        mask = E.mask(self.grid.points)
        return self.grid.dx * np.sum(np.abs(self.eigenvectors[mask]) ** 2, axis=0)


class SpectralRow(ArrayModel):
    sharpness: str
    level: int
    eigenvalue: float
    reference: float
    relative_gap: float
    mass_in_set: float


class SpectralComparison(ArrayModel):
    rows: tuple[SpectralRow, ...]
    trend_monotone: bool
    """Whether the ground level gap moves monotonically along the sharpness sweep"""
    flags: tuple[str, ...] = ()


def weighted_operator(
    a: SampledFunction1D,
    kind: OperatorKind | str = OperatorKind.momentum,
    grid: LineGrid | None = None,
    scheme: Scheme | str = Scheme.spectral,
) -> WeightedOperator:
    """
    ``A P A`` (momentum) or ``A P² A`` (kinetic) for a nonnegative real weight ``a``.

    Raises:
        PreconditionError: for complex or negative weights
    """
    kind, scheme = OperatorKind(kind), Scheme(scheme)
    grid = grid if grid is not None else a.grid
    if not a.grid.matches(grid):
        raise GridMismatchError("Weight is sampled on a different grid")
    if np.max(np.abs(a.values.imag)) > CLIP_TOL:
        raise PreconditionError("Weight must be real")
    weight = a.values.real
    if np.min(weight) < -CLIP_TOL:
        raise PreconditionError(f"Weight must be nonnegative, min is {np.min(weight):g}")
    weight = np.clip(weight, 0, None)

    base = momentum_matrix(grid, scheme) if kind == OperatorKind.momentum else kinetic_matrix(
        grid, scheme
    )
    matrix = weight[:, None] * base.matrix * weight[None, :]
    return WeightedOperator(
        a=a.with_values(weight),
        kind=kind,
        scheme=scheme,
        matrix=OperatorMatrix.from_matrix(grid, matrix, flags=a.flags),
    )


def spectrum(M: OperatorMatrix, k: int | None = None) -> SpectrumResult:
    """
    Hermitian eigendecomposition, all pairs or the lowest ``k``.

    Raises:
        NotHermitianError: if ``M`` is not flagged Hermitian
    """
    if not M.hermitian:
        raise NotHermitianError(
            f"spectrum needs a Hermitian operator, residual {M.hermitian_residual:g}"
        )
    matrix = M.matrix
    if k is None or k >= M.grid.n:
        values, vectors = scipy.linalg.eigh(matrix)
    else:
        values, vectors = scipy.linalg.eigh(matrix, subset_by_index=[0, k - 1])
    residuals = np.linalg.norm(matrix @ vectors - vectors * values[None, :], axis=0)
    return SpectrumResult(
        grid=M.grid,
        eigenvalues=values,
        eigenvectors=vectors / math.sqrt(M.grid.dx),
        residuals=residuals,
    )


def well_reference_spectrum(E: IntervalSet, n_max: int) -> np.ndarray:
    """Dirichlet levels ``(n pi / width)²`` for ``n = 1..n_max``"""
    if n_max < 1:
        raise PreconditionError(f"n_max must be at least 1, got {n_max}")
    n = np.arange(1, n_max + 1)
    return (n * math.pi / E.width) ** 2


def _is_monotone(values: list[float]) -> bool:
    diffs = np.diff(values)
    return bool(np.all(diffs >= 0) or np.all(diffs <= 0))


def compare_spectra(
    family: Mapping[str, WeightedOperator],
    E: IntervalSet,
    k: int = 3,
    mass_threshold: float = MASS_IN_SET,
) -> SpectralComparison:
    """
    Lowest in-set levels of each kinetic operator against the well levels.

    Eigenvectors with less than ``mass_threshold`` of their mass in ``E`` are skipped, which
    drops the near-zero modes that live where the weight vanishes. ``family`` is read in
    order of increasing sharpness. Exploratory: a non-monotone ground level gap is logged,
    never raised.
    """
    reference = well_reference_spectrum(E, k)
    rows: list[SpectralRow] = []
    ground_gaps: dict[str, float] = {}
    flags: list[str] = []
    for label, op in family.items():
        if op.kind != OperatorKind.kinetic:
            raise PreconditionError(
                f"compare_spectra needs kinetic operators, {label} is {op.kind}"
            )
        result = spectrum(op.matrix)
        masses = result.mass_in(E)
        picked = np.flatnonzero(masses >= mass_threshold)[:k]
        if len(picked) < k:
            flags.append(f"{label}: only {len(picked)} of {k} levels concentrated in the set")
        for level, idx in enumerate(picked):
            value = float(result.eigenvalues[idx])
            ref = float(reference[level])
            rows.append(
                SpectralRow(
                    sharpness=str(label),
                    level=level + 1,
                    eigenvalue=value,
                    reference=ref,
                    relative_gap=(value - ref) / ref,
                    mass_in_set=float(masses[idx]),
                )
            )
            if level == 0:
                ground_gaps[str(label)] = (value - ref) / ref

    monotone = _is_monotone(list(ground_gaps.values()))
    if not monotone:
        trend = ", ".join(f"{label}: {gap:.6g}" for label, gap in ground_gaps.items())
        logger.warning("Ground level gap is not monotone along the sweep: %s", trend)
        flags.append(
            f"ground level relative gap to the well is not monotone along the family "
            f"order [{trend}]"
        )
    return SpectralComparison(rows=tuple(rows), trend_monotone=monotone, flags=tuple(flags))
