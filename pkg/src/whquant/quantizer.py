"""
The covariant integral quantization map ``f -> A_f`` on a line grid.

Two routes are implemented:

* :func:`.kernel` assembles the integral kernel of any sampled phase-space function, for
  a pure-state apodization with fiducial ``psi``::

      K(x, x') = (2 pi)^(-1/2) * integral f^_p(q, x' - x) psi(x - q) conj(psi(x' - q)) dq

* :func:`.quantize_u_pn` assembles the operator of ``u(q) p^n`` from 1-D profiles
  ``w = u * gamma``, ``b``, ``c``, ``d`` in symmetrized form.

Their agreement is the main consistency check of the package.
"""

import logging
from typing import TypeAlias

import numpy as np

from whquant.apodization import Apodization, pi_line
from whquant.base import ArrayModel
from whquant.const import SQRT_TWO_PI, TWO_PI
from whquant.exceptions import GridMismatchError, KernelPathUnavailable, UnsupportedOrderError
from whquant.grid import LineGrid, SampledFunction1D, SampledFunction2D
from whquant.mollifiers import (
    IntervalSet,
    SmoothIndicator,
    indicator_convolution,
    smooth_indicator,
)
from whquant.operator import (
    OperatorMatrix,
    kinetic_matrix,
    momentum_function_matrix,
    momentum_matrix,
)
from whquant.progress import make_pbar
from whquant.transforms import convolve_1d, derivative, fourier_1d, translate_rows
from whquant.types import Scheme

logger = logging.getLogger(__name__)

Weight: TypeAlias = SampledFunction1D | SmoothIndicator
"""A position weight ``u``, either sampled directly or as a (smoothed) indicator"""


class CoefficientProfiles(ArrayModel):
    """
    Profiles of the quantized ``u(q) p^n``:

    * ``w = u * gamma`` - the window
    * ``b = -u * (x gamma)``, so that ``A_{u q} = w(Q) Q + b(Q)``
    * ``c = -i u * (psi conj(psi)')``, so that ``A_{u p} = w P + c``
    * ``d = -u * (psi conj(psi)'')``, so that ``A_{u p²} = w P² + 2 c P + d``
    """

    w: SampledFunction1D
    b: SampledFunction1D
    c: SampledFunction1D
    d: SampledFunction1D
    path: str
    """``pure_state`` or ``weyl_closed_form``"""

    @property
    def grid(self) -> LineGrid:
        return self.w.grid

    @property
    def e(self) -> np.ndarray:
        """``c + (i/2) w'``, the zeroth order term of the symmetrized ``A_{u p}``"""
        return self.c.values + 0.5j * derivative(self.w).values


class TruncatedObservables(ArrayModel):
    a_q: OperatorMatrix
    a_p: OperatorMatrix
    a_p2: OperatorMatrix
    profiles: CoefficientProfiles
    weight: SmoothIndicator


class TraceCheck(ArrayModel):
    lhs: float
    rhs: float
    abs_err: float


def _weight_values(u: Weight) -> SampledFunction1D:
    return u.values if isinstance(u, SmoothIndicator) else u


def _check_grid(f: SampledFunction1D, grid: LineGrid) -> None:
    if not f.grid.matches(grid):
        raise GridMismatchError("Weight and apodization are sampled on different grids")


def _smear(u: Weight, g: np.ndarray, grid: LineGrid) -> SampledFunction1D:
    """``u * g``, exact at the endpoints when ``u`` is a sharp indicator"""
    g_fn = SampledFunction1D(grid=grid, values=g)
    if isinstance(u, SmoothIndicator) and not u.smooth:
        return indicator_convolution(u.interval, g_fn)
    u_fn = _weight_values(u)
    out = convolve_1d(u_fn, g_fn)
    if u_fn.is_real and g_fn.is_real:
        return out.with_values(out.values.real)
    return out


def window_function(u: Weight, apod: Apodization) -> SampledFunction1D:
    """The window ``w_u = u * gamma``; ``u`` itself for the Weyl-Wigner kind"""
    u_fn = _weight_values(u)
    _check_grid(u_fn, apod.line_grid)
    if apod.is_weyl:
        return u_fn
    return _smear(u, apod.gamma.values, apod.line_grid)


def window_fourier(u: Weight, apod: Apodization) -> SampledFunction1D:
    """
    ``w^(p) = u^(p) * Pi(0, p)`` on the dual grid.

    The transform of a sharp indicator is taken in closed form.
    """
    u_fn = _weight_values(u)
    _check_grid(u_fn, apod.line_grid)
    momenta = apod.line_grid.dual()
    if isinstance(u, SmoothIndicator) and not u.smooth:
        u_hat = _indicator_transform(u.interval, momenta)
    else:
        u_hat = fourier_1d(u_fn).values
    return SampledFunction1D(grid=momenta, values=u_hat * pi_line(apod, momenta).values)


def _indicator_transform(E: IntervalSet, momenta: LineGrid) -> np.ndarray:
    p = momenta.points
    out = np.full(momenta.n, E.width / SQRT_TWO_PI, dtype=complex)
    nz = p != 0
    out[nz] = (np.exp(-1j * E.alpha * p[nz]) - np.exp(-1j * E.beta * p[nz])) / (
        1j * p[nz] * SQRT_TWO_PI
    )
    return out


def coefficient_profiles(u: Weight, apod: Apodization) -> CoefficientProfiles:
    u_fn = _weight_values(u)
    grid = apod.line_grid
    _check_grid(u_fn, grid)

    if apod.is_weyl:
        du = derivative(u_fn)
        d2u = derivative(u_fn, 2)
        return CoefficientProfiles(
            w=u_fn,
            b=u_fn.with_values(np.zeros(grid.n)),
            c=u_fn.with_values(-0.5j * du.values),
            d=u_fn.with_values(-0.25 * d2u.values),
            path="weyl_closed_form",
        )

    assert apod.psi is not None
    psi = apod.psi
    x = grid.points
    dpsi_bar = derivative(psi).values.conj()
    d2psi_bar = derivative(psi, 2).values.conj()

    w = window_function(u, apod)
    b = _smear(u, x * apod.gamma.values, grid)
    c = _smear(u, psi.values * dpsi_bar, grid)
    d = _smear(u, psi.values * d2psi_bar, grid)
    return CoefficientProfiles(
        w=w,
        b=b.with_values(-b.values),
        c=c.with_values(-1j * c.values),
        d=d.with_values(-d.values),
        path="pure_state",
    )


def _anticommutator(diag: np.ndarray, M: np.ndarray) -> np.ndarray:
    return diag[:, None] * M + M * diag[None, :]


def quantize_u_pn(
    u: Weight,
    n: int,
    apod: Apodization,
    grid: LineGrid | None = None,
    scheme: Scheme | str = Scheme.spectral,
) -> OperatorMatrix:
    """
    Operator of ``u(q) p^n`` assembled from profiles, in symmetrized form.

    With ``e = c + (i/2) w'``::

        n = 0:  w(Q)
        n = 1:  1/2 {w, P} + e(Q)
        n = 2:  1/2 {w, P²} + {e, P} + (i e' + w''/2 + d)(Q)

    Raises:
        UnsupportedOrderError: for ``n > 2``
    """
    if n not in (0, 1, 2):
        raise UnsupportedOrderError(f"Only n in (0, 1, 2) is supported, got {n}")
    grid = grid if grid is not None else apod.line_grid
    if not grid.matches(apod.line_grid):
        raise GridMismatchError("Requested grid differs from the apodization's line grid")

    profiles = coefficient_profiles(u, apod)
    w = profiles.w.values
    if n == 0:
        return OperatorMatrix.diagonal(w, grid)

    e = profiles.e
    P = momentum_matrix(grid, scheme).matrix
    if n == 1:
        matrix = 0.5 * _anticommutator(w, P) + np.diag(e)
    else:
        P2 = kinetic_matrix(grid, scheme).matrix
        e_fn = SampledFunction1D(grid=grid, values=e)
        zeroth = (
            1j * derivative(e_fn).values
            + 0.5 * derivative(profiles.w, 2).values
            + profiles.d.values
        )
        matrix = 0.5 * _anticommutator(w, P2) + _anticommutator(e, P) + np.diag(zeroth)
    return OperatorMatrix.from_matrix(grid, matrix, flags=profiles.w.flags)


def kernel(
    f: SampledFunction2D,
    apod: Apodization,
    grid: LineGrid | None = None,
    progress: bool = False,
) -> OperatorMatrix:
    """
    Integral kernel of ``A_f``.

    For the pure-state kind the q integral is a sum over the rows of ``f``, each adding a
    rank-weighted outer product of displaced fiducials. For the Weyl-Wigner kind only
    p-independent ``f`` is supported, quantized to the multiplication by ``f``.

    Args:
        f: observable on a phase grid; its q axis sets the quadrature over q
        apod: apodization
        grid: line grid of the result, the apodization's by default
        progress: show a progress bar over q rows
    """
    grid = grid if grid is not None else apod.line_grid
    if not grid.matches(apod.line_grid):
        raise GridMismatchError("Requested grid differs from the apodization's line grid")

    if apod.is_weyl:
        return _weyl_multiplication(f, grid)

    assert apod.psi is not None
    q_axis, p_axis = f.grid.q_axis, f.grid.p_axis
    n = grid.n
    y = np.arange(-(n - 1), n) * grid.dx
    f_hat = f.values @ np.exp(-1j * np.outer(p_axis.points, y)) * (p_axis.dx / SQRT_TWO_PI)
    displaced = translate_rows(apod.psi, q_axis.points)
    idx = np.arange(n)[None, :] - np.arange(n)[:, None] + (n - 1)

    entries = np.zeros((n, n), dtype=complex)
    pbar = make_pbar(progress, total=q_axis.n, desc="Kernel rows")
    for i in range(q_axis.n):
        pbar.update()
        if not np.any(f.values[i]):
            continue
        row = displaced[i]
        entries += f_hat[i][idx] * np.outer(row, row.conj())
    pbar.close()
    entries *= q_axis.dx / SQRT_TWO_PI
    return OperatorMatrix.from_matrix(grid, entries * grid.dx, flags=f.flags)


def _weyl_multiplication(f: SampledFunction2D, grid: LineGrid) -> OperatorMatrix:
    values = f.values
    if not np.allclose(values, values[:, :1], rtol=0, atol=1e-12):
        raise KernelPathUnavailable(
            "kernel path unavailable: Weyl-Wigner kernels are only implemented "
            "for p-independent observables"
        )
    if not f.grid.q_axis.matches(grid):
        raise GridMismatchError("Observable's q axis must match the line grid")
    return OperatorMatrix.diagonal(values[:, 0], grid)


def truncated_observables(
    E: IntervalSet,
    sigma: float,
    apod: Apodization,
    grid: LineGrid | None = None,
    scheme: Scheme | str = Scheme.spectral,
) -> TruncatedObservables:
    """Quantized ``u q``, ``u p`` and ``u p²`` for ``u = u_{E, sigma}``"""
    grid = grid if grid is not None else apod.line_grid
    u = smooth_indicator(E, sigma, grid)
    profiles = coefficient_profiles(u, apod)
    a_q = OperatorMatrix.diagonal((grid.points * profiles.w.values + profiles.b.values).real, grid)
    return TruncatedObservables(
        a_q=a_q,
        a_p=quantize_u_pn(u, 1, apod, grid, scheme),
        a_p2=quantize_u_pn(u, 2, apod, grid, scheme),
        profiles=profiles,
        weight=u,
    )


def deformed_ccr_profile(profiles: CoefficientProfiles) -> SampledFunction1D:
    """``i w (w + x w' + b')``, the diagonal that ``[A_q, A_p]`` multiplies by"""
    w = profiles.w
    x = profiles.grid.points
    values = 1j * w.values * (
        w.values + x * derivative(w).values + derivative(profiles.b).values
    )
    return w.with_values(values)


def momentum_symbol(v: SampledFunction1D, apod: Apodization) -> SampledFunction1D:
    """``v * varpi`` for a momentum-only observable ``v(p)`` sampled on the dual grid"""
    if not v.grid.matches(apod.varpi.grid):
        raise GridMismatchError("v must be sampled on the dual of the line grid")
    if apod.is_weyl:
        return v
    out = convolve_1d(v, apod.varpi)
    return out.with_values(out.values.real) if v.is_real else out


def quantize_momentum_function(v: SampledFunction1D, apod: Apodization) -> OperatorMatrix:
    """``A_v = (v * varpi)(P)``"""
    symbol = momentum_symbol(v, apod)
    return momentum_function_matrix(apod.line_grid, symbol.values)


def window_root(u: Weight, apod: Apodization) -> OperatorMatrix:
    """Multiplication by ``sqrt(w_u)``"""
    w = window_function(u, apod)
    return OperatorMatrix.diagonal(np.sqrt(np.clip(w.values.real, 0, None)), apod.line_grid)


def trace_check(A: OperatorMatrix, f: SampledFunction2D) -> TraceCheck:
    """``Tr A_f`` against ``integral f dq dp / 2pi``"""
    lhs = float(np.trace(A.matrix).real)
    rhs = float(f.integral().real / TWO_PI)
    return TraceCheck(lhs=lhs, rhs=rhs, abs_err=abs(lhs - rhs))

