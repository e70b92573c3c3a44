"""
Fourier conventions on uniform grids.

Every transform samples the continuum integral, not the raw discrete bins::

    F[f](p) = (2*pi)^(-1/2) * integral f(x) exp(-i*x*p) dx

The rectangle rule on the grid is turned into an FFT by pulling the grid offsets
out as phase factors, so any pair of grids with ``n * dx * dp = 2*pi`` works as
source/target. Outputs land on the centered dual grid unless a target is given.

The 2-D transforms are separable products of the 1-D one, and the symplectic
transform is the 2-D transform read off at rotated arguments.
"""

import logging
import math

import numpy as np
import scipy.fft

from whquant.const import DECAY_FLOOR, SQRT_TWO_PI, TWO_PI
from whquant.exceptions import GridMismatchError, PreconditionError
from whquant.grid import LineGrid, PhaseGrid, SampledFunction1D, SampledFunction2D
from whquant.types import TransformDirection

logger = logging.getLogger(__name__)


def edge_flags(
    values: np.ndarray, floor: float = DECAY_FLOOR, label: str = "input"
) -> tuple[str, ...]:
    """
    Flag axes along which ``values`` do not decay below ``floor`` times their max at the edges.

    Periodic transforms wrap such inputs around.
    """
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    if scale == 0:
        return ()
    flags = []
    for axis in range(values.ndim):
        edges = np.take(values, [0, -1], axis=axis)
        if np.max(np.abs(edges)) > floor * scale:
            flags.append(
                f"{label}: values at the edges of axis {axis} exceed {floor:g} of the max "
                "(wraparound risk)"
            )
    for flag in flags:
        logger.debug(flag)
    return tuple(flags)


def _axis_transform(
    values: np.ndarray, source: LineGrid, target: LineGrid, sign: int, axis: int = 0
) -> np.ndarray:
    """
    ``(2*pi)^(-1/2) * sum_j f(x_j) exp(sign*i*x_j*p_k) dx`` for every node ``p_k`` of target.
    """
    n = source.n
    if target.n != n or not math.isclose(n * source.dx * target.dx, TWO_PI, rel_tol=1e-9):
        raise GridMismatchError(
            f"Grids are not conjugate: n={n}/{target.n}, n*dx*dp={n * source.dx * target.dx}"
        )
    shape = [1] * values.ndim
    shape[axis] = n
    j = np.arange(n).reshape(shape)
    pre = np.exp(sign * 1j * j * source.dx * target.x_min)
    post = np.exp(sign * 1j * source.x_min * (target.x_min + j * target.dx))
    if sign < 0:
        raw = scipy.fft.fft(values * pre, axis=axis)
    else:
        raw = scipy.fft.ifft(values * pre, axis=axis) * n
    return raw * post * (source.dx / SQRT_TWO_PI)


def fourier_1d(
    f: SampledFunction1D,
    direction: TransformDirection | str = TransformDirection.forward,
    target: LineGrid | None = None,
    floor: float = DECAY_FLOOR,
) -> SampledFunction1D:
    """
    Continuum-normalized 1-D Fourier transform.

    Args:
        f: samples to transform
        direction: ``forward`` uses ``exp(-i*x*p)``, ``inverse`` uses ``exp(+i*x*p)``
        target: output grid. Defaults to the centered dual of ``f.grid``;
            pass the original grid to come back from a transform of a non-centered input.
        floor: edge decay threshold for the wraparound flag
    """
    direction = TransformDirection(direction)
    target = target if target is not None else f.grid.dual()
    sign = -1 if direction == TransformDirection.forward else 1
    values = _axis_transform(f.values, f.grid, target, sign)
    return SampledFunction1D(
        grid=target, values=values, flags=(*f.flags, *edge_flags(f.values, floor, "fourier_1d"))
    )


def partial_fourier_p(F: SampledFunction2D, floor: float = DECAY_FLOOR) -> SampledFunction2D:
    """
    Forward transform in the second variable, row by row:
    ``F_p(q, y) = (2*pi)^(-1/2) * integral F(q, p) exp(-i*y*p) dp``
    """
    grid = F.grid
    y_axis = grid.p_axis.dual()
    values = _axis_transform(F.values, grid.p_axis, y_axis, -1, axis=1)
    # only decay in p matters here
    flags = tuple(
        flag for flag in edge_flags(F.values, floor, "partial_fourier_p") if "axis 1" in flag
    )
    return SampledFunction2D(
        grid=PhaseGrid(q_axis=grid.q_axis, p_axis=y_axis),
        values=values,
        flags=(*F.flags, *flags),
    )


def _reflection_index(n: int) -> np.ndarray:
    """Index of ``-x_j`` on a centered grid; the unmatched first node maps to itself"""
    return (-np.arange(n)) % n


def reflect(F: SampledFunction2D) -> SampledFunction2D:
    """``F(-q, -p)`` on a centered phase grid"""
    if not F.grid.is_centered:
        raise PreconditionError("Reflection needs a phase grid centered on the origin")
    nq, np_ = F.grid.shape
    values = F.values[_reflection_index(nq)][:, _reflection_index(np_)]
    return F.with_values(values)


def symplectic_fourier(
    F: SampledFunction2D, dual: bool = False, floor: float = DECAY_FLOOR
) -> SampledFunction2D:
    """
    Symplectic Fourier transform::

        Fs[F](q, p) = integral exp(-i*(q*p' - q'*p)) F(q', p') dq' dp' / (2*pi)

    Computed as the ordinary 2-D transform ``G(k1, k2)`` evaluated at ``k1 = -p, k2 = q``.
    The output q axis is the dual of the input p axis and vice versa, so a phase grid
    built with :meth:`.PhaseGrid.from_line` on a centered line is mapped onto itself and
    the transform is involutive there.

    Args:
        dual: return ``Fs[F](-q, -p)`` instead
    """
    grid = F.grid
    k1 = grid.q_axis.dual()
    k2 = grid.p_axis.dual()
    G = _axis_transform(F.values, grid.q_axis, k1, -1, axis=0)
    G = _axis_transform(G, grid.p_axis, k2, -1, axis=1)
    # rows indexed by k2 (= q), columns by k1 read at -p
    values = G.T[:, _reflection_index(k1.n)]
    if dual:
        values = values[_reflection_index(k2.n)][:, _reflection_index(k1.n)]
    return SampledFunction2D(
        grid=PhaseGrid(q_axis=k2, p_axis=k1),
        values=values,
        flags=(*F.flags, *edge_flags(F.values, floor, "symplectic_fourier")),
    )


def convolve_1d(
    f: SampledFunction1D, g: SampledFunction1D, floor: float = DECAY_FLOOR
) -> SampledFunction1D:
    """
    ``(f*g)(x) = integral f(x - y) g(y) dy`` through the transforms.

    Exact (up to wraparound) for grids whose offset is a whole number of cells,
    which includes every centered grid.
    """
    if not f.grid.matches(g.grid):
        raise GridMismatchError("convolve_1d needs both functions on the same grid")
    grid = f.grid
    dual = grid.dual()
    F = _axis_transform(f.values, grid, dual, -1)
    G = _axis_transform(g.values, grid, dual, -1)
    values = _axis_transform(F * G * SQRT_TWO_PI, dual, grid, 1)
    flags = edge_flags(f.values, floor, "convolve_1d lhs") + edge_flags(
        g.values, floor, "convolve_1d rhs"
    )
    return SampledFunction1D(grid=grid, values=values, flags=flags)


def convolve_2d(
    f: SampledFunction2D, g: SampledFunction2D, floor: float = DECAY_FLOOR
) -> SampledFunction2D:
    """Phase-space convolution ``integral f(q - q', p - p') g(q', p') dq' dp'``"""
    if not f.grid.matches(g.grid):
        raise GridMismatchError("convolve_2d needs both functions on the same grid")
    grid = f.grid
    kq, kp = grid.q_axis.dual(), grid.p_axis.dual()

    def _forward(values: np.ndarray) -> np.ndarray:
        out = _axis_transform(values, grid.q_axis, kq, -1, axis=0)
        return _axis_transform(out, grid.p_axis, kp, -1, axis=1)

    product = _forward(f.values) * _forward(g.values) * TWO_PI
    values = _axis_transform(product, kq, grid.q_axis, 1, axis=0)
    values = _axis_transform(values, kp, grid.p_axis, 1, axis=1)
    flags = edge_flags(f.values, floor, "convolve_2d lhs") + edge_flags(
        g.values, floor, "convolve_2d rhs"
    )
    return SampledFunction2D(grid=grid, values=values, flags=flags)


def translate_rows(f: SampledFunction1D, shifts: np.ndarray) -> np.ndarray:
    """
    ``f(x - a)`` for every ``a`` in ``shifts``, as a ``(len(shifts), n)`` array.

    The shift is a phase ``exp(-i*a*k)`` on the dual grid, so shifts need not be
    multiples of dx; the result is periodic in the grid length.
    """
    grid = f.grid
    dual = grid.dual()
    F = _axis_transform(f.values, grid, dual, -1)
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    phased = F[None, :] * np.exp(-1j * np.outer(shifts, dual.points))
    return _axis_transform(phased, dual, grid, 1, axis=1)


def translate(f: SampledFunction1D, shift: float) -> SampledFunction1D:
    """``f(x - shift)``"""
    if shift == 0:
        return f
    flags = ()
    if abs(shift) >= f.grid.length / 2:
        flags = (f"translate: shift {shift:g} exceeds half the grid length (wraparound)",)
    return f.with_values(translate_rows(f, np.array([shift]))[0], flags=flags)


def derivative(f: SampledFunction1D, order: int = 1) -> SampledFunction1D:
    """
    Spectral derivative, multiplying by ``(i*k)^order`` on the dual grid.

    The unpaired Nyquist mode is dropped for odd orders so real input stays real.
    """
    grid = f.grid
    dual = grid.dual()
    k = dual.points
    symbol = (1j * k) ** order
    if order % 2:
        symbol[0] = 0
    F = _axis_transform(f.values, grid, dual, -1)
    return f.with_values(_axis_transform(F * symbol, dual, grid, 1))


def antiderivative(f: SampledFunction1D) -> SampledFunction1D:
    """
    Spectral antiderivative, pinned to zero at the left edge.

    Only meaningful for zero-mass input that decays at both ends; the mean mode is dropped.
    """
    grid = f.grid
    dual = grid.dual()
    k = dual.points
    symbol = np.zeros(grid.n, dtype=complex)
    nonzero = k != 0
    symbol[nonzero] = 1 / (1j * k[nonzero])
    symbol[0] = 0
    F = _axis_transform(f.values, grid, dual, -1)
    values = _axis_transform(F * symbol, dual, grid, 1)
    return f.with_values(values - values[0])


def fourier_multiplier_matrix(grid: LineGrid, symbol: np.ndarray) -> np.ndarray:
    """
    Dense matrix of ``g(P)``: transform, multiply by ``symbol`` sampled on the dual grid,
    transform back.
    """
    dual = grid.dual()
    eye = np.eye(grid.n, dtype=complex)
    F = _axis_transform(eye, grid, dual, -1, axis=0)
    return _axis_transform(np.asarray(symbol)[:, None] * F, dual, grid, 1, axis=0)


def translation_matrix(grid: LineGrid, shift: float) -> np.ndarray:
    """Dense matrix of ``exp(-i*shift*P)``, which maps ``f(x)`` to ``f(x - shift)``"""
    if shift == 0:
        return np.eye(grid.n, dtype=complex)
    return fourier_multiplier_matrix(grid, np.exp(-1j * shift * grid.dual().points))
