"""
Apodization functions ``Pi(q, p)``, their 1-D profiles, Wigner functions and displacements.

Displacements follow ``U(q, p) = exp(i p Q / 2) exp(-i q P) exp(i p Q / 2)``, which acts as
``(U(q,p) phi)(x) = exp(i p x - i q p / 2) phi(x - q)``.
For a fiducial state ``psi`` the apodization is the overlap

    Pi(q, p) = <psi | U(-q, -p) psi>
            = exp(-i q p / 2) * integral conj(psi(x)) exp(-i p x) psi(x + q) dx

and its profiles are ``gamma(x) = |psi(x)|²`` and ``varpi(p) = |psi^(p)|²``.
"""

import logging
from functools import cached_property
from typing import Self

import numpy as np
from pydantic import model_validator

from whquant.base import ArrayModel
from whquant.const import (
    ASSUMPTION_TOL,
    DECAY_FLOOR,
    NORMALIZATION_TOL,
    PI_TOL,
    SMOOTHNESS_RATIO,
    SQRT_TWO_PI,
    TWO_PI,
)
from whquant.exceptions import PreconditionError
from whquant.grid import LineGrid, PhaseGrid, SampledFunction1D, SampledFunction2D
from whquant.operator import OperatorMatrix
from whquant.transforms import (
    edge_flags,
    fourier_1d,
    partial_fourier_p,
    reflect,
    symplectic_fourier,
    translate,
    translate_rows,
    translation_matrix,
)
from whquant.types import ApodizationKind

logger = logging.getLogger(__name__)


class AssumptionCheck(ArrayModel):
    passed: bool
    extremum: float | None = None
    """The minimum (or smoothness ratio) the verdict is based on"""
    distributional: bool = False
    """Holds only in the sense of measures/distributions, not pointwise on the grid"""
    detail: str = ""


class AssumptionReport(ArrayModel):
    """
    Checks of the three standing assumptions on an apodization:

    * ``a1_nonneg_fs`` - the symplectic transform of ``Pi`` is nonnegative
    * ``a2_smoothness_proxy`` - ``Pi^_p`` is twice differentiable, proxied by second
      differences that stay bounded when the grid spacing is halved
    * ``a3_nonneg_partial_at_q0`` - ``Pi^_p(0, y)`` is nonnegative
    """

    a1_nonneg_fs: AssumptionCheck
    a2_smoothness_proxy: AssumptionCheck
    a3_nonneg_partial_at_q0: AssumptionCheck

    @property
    def all_passed(self) -> bool:
        return all(
            check.passed
            for check in (self.a1_nonneg_fs, self.a2_smoothness_proxy, self.a3_nonneg_partial_at_q0)
        )

    @property
    def distributional(self) -> bool:
        return any(
            check.distributional
            for check in (self.a1_nonneg_fs, self.a2_smoothness_proxy, self.a3_nonneg_partial_at_q0)
        )


class Apodization(ArrayModel):
    kind: ApodizationKind
    pi_values: SampledFunction2D
    psi: SampledFunction1D | None = None
    gamma: SampledFunction1D
    """Position profile, a unit mass spike for the Weyl-Wigner kind"""
    varpi: SampledFunction1D
    """Momentum profile on the dual of the line grid"""
    assumption_report: AssumptionReport
    even: bool = False
    """``Pi(-q, -p) = Pi(q, p)`` within 1e-8"""
    flags: tuple[str, ...] = ()

    @model_validator(mode="after")
    def normalized(self) -> Self:
        grid = self.pi_values.grid
        if grid.q_axis.has_node(0) and grid.p_axis.has_node(0):
            origin = self.pi_values.values[grid.q_axis.index_of(0), grid.p_axis.index_of(0)]
            assert abs(origin - 1) < PI_TOL, f"Pi(0,0) must be 1, got {origin}"
        sup = float(np.max(np.abs(self.pi_values.values)))
        assert sup <= 1 + PI_TOL, f"|Pi| must be bounded by 1, got {sup}"
        if self.kind == ApodizationKind.pure_state:
            assert self.psi is not None, "Pure state apodization needs its fiducial state"
            assert abs(self.psi.norm() - 1) < 1e-10, "Fiducial state must be normalized"
        return self

    @property
    def is_weyl(self) -> bool:
        return self.kind == ApodizationKind.weyl_wigner

    @property
    def line_grid(self) -> LineGrid:
        """The position grid that gamma, psi and the quantized operators live on"""
        return self.gamma.grid

    @property
    def phase_grid(self) -> PhaseGrid:
        return self.pi_values.grid

    @cached_property
    def autocorrelation(self) -> SampledFunction2D:
        """
        The portrait kernel ``(1/2pi) * dual Fs[Pi * Pi~]`` with ``Pi~(q,p) = Pi(-q,-p)``.

        A unit mass spike at the origin for the Weyl-Wigner kind.
        """
        grid = self.phase_grid
        if self.is_weyl:
            values = np.zeros(grid.shape)
            values[grid.q_axis.index_of(0), grid.p_axis.index_of(0)] = 1 / grid.cell
            return SampledFunction2D(grid=grid, values=values)
        product = self.pi_values.with_values(self.pi_values.values * reflect(self.pi_values).values)
        kernel = symplectic_fourier(product, dual=True)
        return kernel.with_values(kernel.values / TWO_PI)


def _check_normalized(psi: SampledFunction1D) -> SampledFunction1D:
    norm = psi.norm()
    if abs(norm - 1) > NORMALIZATION_TOL:
        raise PreconditionError(f"Fiducial state must be normalized, measured norm {norm:.12g}")
    return psi.with_values(psi.values / norm)


def _overlap(psi: SampledFunction1D, q: np.ndarray, p: np.ndarray) -> np.ndarray:
    """``Pi(q_i, p_k)`` for the fiducial ``psi``"""
    grid = psi.grid
    shifted = translate_rows(psi, -q)  # psi(x + q_i)
    phases = np.exp(-1j * np.outer(grid.points, p))
    integral = (shifted * psi.values.conj()[None, :]) @ phases * grid.dx
    return np.exp(-0.5j * np.outer(q, p)) * integral


def _spike(grid: LineGrid) -> np.ndarray:
    if not grid.has_node(0):
        raise PreconditionError("Weyl-Wigner profiles need a grid node at the origin")
    values = np.zeros(grid.n)
    values[grid.index_of(0)] = 1 / grid.dx
    return values


def _is_even(pi_values: SampledFunction2D) -> bool:
    if not pi_values.grid.is_centered:
        return False
    diff = np.max(np.abs(reflect(pi_values).values - pi_values.values))
    return bool(diff < PI_TOL)


def weyl_wigner_apodization(grid: PhaseGrid) -> Apodization:
    """``Pi = 1``, the Weyl-Wigner quantization; gamma and varpi are Dirac masses"""
    line = grid.q_axis
    pi_values = SampledFunction2D(grid=grid, values=np.ones(grid.shape))
    return Apodization(
        kind=ApodizationKind.weyl_wigner,
        pi_values=pi_values,
        gamma=SampledFunction1D(grid=line, values=_spike(line)),
        varpi=SampledFunction1D(grid=line.dual(), values=_spike(line.dual())),
        assumption_report=_assess(ApodizationKind.weyl_wigner, pi_values),
        even=True,
    )


def pure_state_apodization(psi: SampledFunction1D, grid: PhaseGrid) -> Apodization:
    """
    Apodization of the rank one fiducial ``|psi><psi|``.

    Args:
        psi: fiducial state, normalized within 1e-8 and decaying at the grid edges
        grid: where ``Pi`` is sampled. Only the profiles and quantized operators
            use ``psi.grid``.
    """
    psi = _check_normalized(psi)
    flags = edge_flags(psi.values, DECAY_FLOOR, "fiducial state")
    line = psi.grid
    pi_values = SampledFunction2D(
        grid=grid, values=_overlap(psi, grid.q_axis.points, grid.p_axis.points)
    )

    momenta = line.dual()
    pi_zero = SampledFunction1D(
        grid=momenta, values=_overlap(psi, np.zeros(1), momenta.points)[0]
    )
    gamma = fourier_1d(pi_zero, "inverse", target=line)
    gamma = gamma.with_values(gamma.values.real / SQRT_TWO_PI)

    pi_q_axis = SampledFunction1D(grid=line, values=_overlap(psi, line.points, np.zeros(1))[:, 0])
    varpi = fourier_1d(pi_q_axis, "forward")
    varpi = varpi.with_values(varpi.values.real / SQRT_TWO_PI)

    logger.debug("Built pure state apodization on %s x %s grid", *grid.shape)
    return Apodization(
        kind=ApodizationKind.pure_state,
        pi_values=pi_values,
        psi=psi,
        gamma=gamma,
        varpi=varpi,
        assumption_report=_assess(ApodizationKind.pure_state, pi_values),
        even=_is_even(pi_values),
        flags=(*flags, *gamma.flags, *varpi.flags),
    )


def pi_line(apod: Apodization, p_grid: LineGrid) -> SampledFunction1D:
    """``Pi(0, p)`` on an arbitrary momentum grid"""
    if apod.is_weyl:
        return SampledFunction1D(grid=p_grid, values=np.ones(p_grid.n))
    assert apod.psi is not None
    return SampledFunction1D(grid=p_grid, values=_overlap(apod.psi, np.zeros(1), p_grid.points)[0])


def coherent_state(apod: Apodization, q: float, p: float) -> SampledFunction1D:
    """``|q, p> = U(q, p) psi``"""
    if apod.is_weyl or apod.psi is None:
        raise PreconditionError("The Weyl-Wigner apodization has no fiducial state to displace")
    psi = apod.psi
    moved = translate(psi, q)
    x = psi.grid.points
    return moved.with_values(np.exp(1j * p * x - 0.5j * q * p) * moved.values)


def wigner_function(psi: SampledFunction1D, grid: PhaseGrid) -> SampledFunction2D:
    """
    ``W(q, p) = (1/pi) * integral conj(psi(q + s)) psi(q - s) exp(2 i p s) ds``

    Related to the apodization of ``psi`` by ``Fs[Pi](q, p) = 2 pi W(-q, -p)``.

    The sum runs over ``s = m dx/2`` with ``psi`` interpolated spectrally onto the half
    nodes, so it resolves every momentum of the dual grid without aliased copies.
    ``psi`` is zero outside its grid, and the q axis must consist of its nodes.
    """
    line = psi.grid
    n = line.n
    offsets = (grid.q_axis.points - line.x_min) / line.dx
    index = np.rint(offsets).astype(int)
    if np.any(np.abs(offsets - index) > 1e-9) or np.any((index < 0) | (index >= n)):
        raise PreconditionError("Wigner function needs q nodes on the grid of psi")

    padded = np.zeros(4 * n, dtype=complex)
    padded[n : 3 * n : 2] = psi.values
    padded[n + 1 : 3 * n : 2] = translate(psi, -line.dx / 2).values  # psi(x + dx/2)
    m = np.arange(-n, n + 1)
    centers = n + 2 * index
    ahead = padded[centers[:, None] + m[None, :]].conj()  # conj psi(q + s)
    behind = padded[centers[:, None] - m[None, :]]  # psi(q - s)
    phases = np.exp(1j * np.outer(m * line.dx, grid.p_axis.points))
    values = (ahead * behind) @ phases * (line.dx / TWO_PI)
    return SampledFunction2D(
        grid=grid, values=values.real, flags=edge_flags(psi.values, DECAY_FLOOR, "wigner psi")
    )


def displacement_matrix(grid: LineGrid, q: float, p: float) -> OperatorMatrix:
    """
    ``U(q, p)`` as ``exp(i p Q/2) exp(-i q P) exp(i p Q/2)``.

    Equal to the disentangled ``exp(-i q p/2) exp(i p Q) exp(-i q P)``, and exactly unitary
    on the periodic grid with ``U(q, p)^H = U(-q, -p)``.
    """
    flags: tuple[str, ...] = ()
    if abs(q) >= grid.length / 2:
        flags = (f"displacement: shift q={q:g} wraps around a grid of length {grid.length:g}",)
        logger.debug(flags[0])
    half = np.exp(0.5j * p * grid.points)
    matrix = half[:, None] * translation_matrix(grid, q) * half[None, :]
    return OperatorMatrix.from_matrix(grid, matrix, flags=flags)


def _second_difference_scale(values: np.ndarray, steps: tuple[float, float]) -> np.ndarray:
    """Max ``|second difference| / h²`` along each axis"""
    out = []
    for axis, h in enumerate(steps):
        d2 = np.diff(values, n=2, axis=axis)
        out.append(float(np.max(np.abs(d2))) / h**2 if d2.size else 0.0)
    return np.array(out)


def _assess(kind: ApodizationKind, pi_values: SampledFunction2D) -> AssumptionReport:
    if kind == ApodizationKind.weyl_wigner:
        detail = "Pi = 1: transforms are Dirac masses"
        return AssumptionReport(
            a1_nonneg_fs=AssumptionCheck(passed=False, distributional=True, detail=detail),
            a2_smoothness_proxy=AssumptionCheck(passed=False, distributional=True, detail=detail),
            a3_nonneg_partial_at_q0=AssumptionCheck(
                passed=False, distributional=True, detail=detail
            ),
        )

    fs_min = float(np.min(symplectic_fourier(pi_values).values.real))
    a1 = AssumptionCheck(
        passed=fs_min >= -ASSUMPTION_TOL, extremum=fs_min, detail="min of Fs[Pi]"
    )

    partial = partial_fourier_p(pi_values)
    grid = partial.grid
    fine = _second_difference_scale(partial.values, (grid.q_axis.dx, grid.p_axis.dx))
    coarse = _second_difference_scale(
        partial.values[::2, ::2], (2 * grid.q_axis.dx, 2 * grid.p_axis.dx)
    )
    ratios = np.divide(fine, coarse, out=np.ones_like(fine), where=coarse > 0)
    ratio = float(np.max(ratios))
    a2 = AssumptionCheck(
        passed=ratio <= SMOOTHNESS_RATIO,
        extremum=float(np.max(fine)),
        detail=f"second-difference growth under refinement: {ratio:.4g}",
    )

    if grid.q_axis.has_node(0):
        row_min = float(np.min(partial.values[grid.q_axis.index_of(0)].real))
        a3 = AssumptionCheck(
            passed=row_min >= -ASSUMPTION_TOL, extremum=row_min, detail="min over y of Pi^_p(0, y)"
        )
    else:
        a3 = AssumptionCheck(passed=False, detail="q axis has no node at 0")

    report = AssumptionReport(a1_nonneg_fs=a1, a2_smoothness_proxy=a2, a3_nonneg_partial_at_q0=a3)
    if not report.all_passed:
        logger.info("Apodization fails assumptions: %s", report)
    return report


def validate_assumptions(apod: Apodization) -> AssumptionReport:
    """Recompute the assumption checks for ``apod``"""
    return _assess(apod.kind, apod.pi_values)
