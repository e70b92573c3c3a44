"""
Uniform line and phase-space grids, and functions sampled on them.
"""

import math
from collections.abc import Callable
from typing import Self

import numpy as np
from pydantic import model_validator

from whquant.base import ArrayModel
from whquant.const import TWO_PI
from whquant.types import ComplexArray, GridSize

_MATCH_RTOL = 1e-9


class LineGrid(ArrayModel):
    """
    Uniform grid ``x_j = x_min + j*dx`` for ``j = 0..n-1``, with ``dx = (x_max - x_min)/n``.

    The right endpoint is not a node: the grid is one period of a periodic lattice,
    which is what the discrete transforms assume.
    """

    x_min: float
    x_max: float
    n: GridSize

    @model_validator(mode="after")
    def nondegenerate(self) -> Self:
        assert math.isfinite(self.x_min) and math.isfinite(self.x_max), "Grid bounds must be finite"
        assert self.x_max > self.x_min, "Grid interval must have x_max > x_min"
        return self

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def dp(self) -> float:
        """Spacing of the dual (frequency) grid"""
        return TWO_PI / (self.n * self.dx)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def points(self) -> np.ndarray:
        return self.x_min + np.arange(self.n) * self.dx

    @property
    def is_centered(self) -> bool:
        """Whether the grid is ``-n/2*dx .. (n/2-1)*dx``, so that ``x -> -x`` maps nodes to nodes"""
        return math.isclose(self.x_min, -self.n / 2 * self.dx, rel_tol=0, abs_tol=1e-9 * self.dx)

    def dual(self) -> "LineGrid":
        """The frequency grid, centered on zero, with spacing ``2*pi/(n*dx)``"""
        half = self.n / 2 * self.dp
        return LineGrid(x_min=-half, x_max=half, n=self.n)

    def matches(self, other: "LineGrid") -> bool:
        """Same nodes, up to floating point noise from repeated dualization"""
        return (
            self.n == other.n
            and math.isclose(self.x_min, other.x_min, rel_tol=0, abs_tol=_MATCH_RTOL * self.dx)
            and math.isclose(self.dx, other.dx, rel_tol=_MATCH_RTOL)
        )

    def index_of(self, x: float) -> int:
        """Index of the node nearest to ``x``"""
        return int(np.clip(round((x - self.x_min) / self.dx), 0, self.n - 1))

    def has_node(self, x: float) -> bool:
        offset = (x - self.x_min) / self.dx
        return 0 <= round(offset) < self.n and abs(offset - round(offset)) < 1e-9

    def contains(self, lo: float, hi: float) -> bool:
        """Whether ``[lo, hi]`` lies inside the grid's span"""
        return self.x_min <= lo and hi <= self.x_max


class PhaseGrid(ArrayModel):
    """
    Product grid on the (q, p) plane, indexed row-major as ``values[i_q, i_p]``
    """

    q_axis: LineGrid
    p_axis: LineGrid

    @classmethod
    def from_line(cls, line: LineGrid) -> "PhaseGrid":
        """
        The phase grid whose p axis is the dual of its q axis.

        For a centered line this grid is mapped onto itself by the symplectic transform.
        """
        return cls(q_axis=line, p_axis=line.dual())

    @property
    def shape(self) -> tuple[int, int]:
        return (self.q_axis.n, self.p_axis.n)

    @property
    def cell(self) -> float:
        """Area element dq*dp"""
        return self.q_axis.dx * self.p_axis.dx

    @property
    def is_centered(self) -> bool:
        return self.q_axis.is_centered and self.p_axis.is_centered

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.q_axis.points, self.p_axis.points, indexing="ij")

    def matches(self, other: "PhaseGrid") -> bool:
        return self.q_axis.matches(other.q_axis) and self.p_axis.matches(other.p_axis)


class SampledFunction1D(ArrayModel):
    """
    Complex samples of a function on a :class:`.LineGrid`
    """

    grid: LineGrid
    values: ComplexArray
    flags: tuple[str, ...] = ()
    """Non-fatal numerical warnings raised while producing these values"""

    @model_validator(mode="after")
    def shape_matches_grid(self) -> Self:
        assert self.values.shape == (self.grid.n,), (
            f"Expected {self.grid.n} values, got shape {self.values.shape}"
        )
        return self

    @classmethod
    def from_callable(
        cls, grid: LineGrid, fn: Callable[[np.ndarray], np.ndarray]
    ) -> "SampledFunction1D":
        return cls(grid=grid, values=fn(grid.points))

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    @property
    def is_real(self) -> bool:
        return not np.any(self.values.imag)

    def with_values(self, values: np.ndarray, flags: tuple[str, ...] = ()) -> "SampledFunction1D":
        """Same grid, new values; flags accumulate"""
        return SampledFunction1D(grid=self.grid, values=values, flags=(*self.flags, *flags))

    def norm(self) -> float:
        """L2 norm by grid quadrature"""
        return math.sqrt(self.grid.dx * float(np.sum(np.abs(self.values) ** 2)))

    def integral(self) -> complex:
        return complex(self.grid.dx * np.sum(self.values))


class SampledFunction2D(ArrayModel):
    """
    Complex samples of a function on a :class:`.PhaseGrid`
    """

    grid: PhaseGrid
    values: ComplexArray
    flags: tuple[str, ...] = ()

    @model_validator(mode="after")
    def shape_matches_grid(self) -> Self:
        assert self.values.shape == self.grid.shape, (
            f"Expected shape {self.grid.shape}, got {self.values.shape}"
        )
        return self

    @classmethod
    def from_callable(
        cls, grid: PhaseGrid, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    ) -> "SampledFunction2D":
        q, p = grid.mesh()
        return cls(grid=grid, values=np.broadcast_to(fn(q, p), grid.shape))

    @property
    def is_real(self) -> bool:
        return not np.any(self.values.imag)

    def with_values(self, values: np.ndarray, flags: tuple[str, ...] = ()) -> "SampledFunction2D":
        return SampledFunction2D(grid=self.grid, values=values, flags=(*self.flags, *flags))

    def integral(self) -> complex:
        return complex(self.grid.cell * np.sum(self.values))


def make_line_grid(x_min: float, x_max: float, n: int) -> LineGrid:
    """
    Build a :class:`.LineGrid`.

    Raises :class:`pydantic.ValidationError` (a :class:`ValueError`) when ``n``
    is not a power of two of at least 8 or when ``x_max <= x_min``.
    """
    return LineGrid(x_min=x_min, x_max=x_max, n=n)
