"""
Dense operators on a line grid, and the basic discretizations of Q, P and P².

An :class:`.OperatorMatrix` stores the integral kernel ``K(x_i, x_j)``;
its action is the quadrature ``(A phi)(x_i) = dx * sum_j K(x_i, x_j) phi(x_j)``.
"""

import logging
from functools import cached_property
from typing import Self, overload

import numpy as np
import scipy.linalg
from pydantic import model_validator

from whquant.base import ArrayModel
from whquant.const import HERMITIAN_TOL
from whquant.exceptions import GridMismatchError, NotHermitianError
from whquant.grid import LineGrid, SampledFunction1D
from whquant.transforms import fourier_multiplier_matrix
from whquant.types import ComplexArray, Scheme

logger = logging.getLogger(__name__)


def hermitian_residual(matrix: np.ndarray) -> float:
    """``max |M - M^H|``"""
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.conj().T)))


class OperatorMatrix(ArrayModel):
    grid: LineGrid
    entries: ComplexArray
    """Kernel values ``K(x_i, x_j)``"""
    hermitian: bool = False
    """Whether ``max |M - M^H| < 1e-9`` for the quadrature matrix ``M = K * dx``"""
    flags: tuple[str, ...] = ()

    @model_validator(mode="after")
    def square_on_grid(self) -> Self:
        n = self.grid.n
        assert self.entries.shape == (n, n), f"Expected ({n}, {n}), got {self.entries.shape}"
        return self

    @model_validator(mode="after")
    def hermitian_flag_holds(self) -> Self:
        if self.hermitian:
            residual = hermitian_residual(self.matrix)
            assert residual < HERMITIAN_TOL, f"Flagged Hermitian but max |M - M^H| = {residual:g}"
        return self

    @classmethod
    def from_matrix(
        cls,
        grid: LineGrid,
        matrix: np.ndarray,
        flags: tuple[str, ...] = (),
        tol: float = HERMITIAN_TOL,
    ) -> "OperatorMatrix":
        """
        Wrap a quadrature matrix (one that acts on sample vectors directly),
        setting the Hermitian flag from the measured residual.
        """
        matrix = np.asarray(matrix, dtype=complex)
        residual = hermitian_residual(matrix)
        return cls(
            grid=grid,
            entries=matrix / grid.dx,
            hermitian=residual < min(tol, HERMITIAN_TOL),
            flags=flags,
        )

    @classmethod
    def identity(cls, grid: LineGrid) -> "OperatorMatrix":
        return cls.from_matrix(grid, np.eye(grid.n))

    @classmethod
    def diagonal(cls, values: SampledFunction1D | np.ndarray, grid: LineGrid) -> "OperatorMatrix":
        """Multiplication operator by ``values``"""
        if isinstance(values, SampledFunction1D):
            if not values.grid.matches(grid):
                raise GridMismatchError("Multiplier is sampled on a different grid")
            values = values.values
        return cls.from_matrix(grid, np.diag(np.asarray(values, dtype=complex)))

    @property
    def quadrature_weight(self) -> float:
        return self.grid.dx

    @cached_property
    def matrix(self) -> np.ndarray:
        """The matrix acting on sample vectors, ``K * dx``"""
        matrix = self.entries * self.grid.dx
        matrix.flags.writeable = False
        return matrix

    @property
    def hermitian_residual(self) -> float:
        return hermitian_residual(self.matrix)

    @cached_property
    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        """
        Ascending eigenvalues and quadrature-orthonormal eigenvectors (columns).

        Computed once per operator and reused by spectra and propagators.
        """
        if not self.hermitian:
            raise NotHermitianError(
                f"Eigendecomposition needs a Hermitian operator, residual "
                f"{self.hermitian_residual:g}"
            )
        logger.debug("Diagonalizing %d x %d operator", self.grid.n, self.grid.n)
        values, vectors = scipy.linalg.eigh(self.matrix)
        vectors = vectors / np.sqrt(self.grid.dx)
        values.flags.writeable = False
        vectors.flags.writeable = False
        return values, vectors

    @overload
    def apply(self, phi: SampledFunction1D) -> SampledFunction1D: ...

    @overload
    def apply(self, phi: np.ndarray) -> np.ndarray: ...

    def apply(self, phi: SampledFunction1D | np.ndarray) -> SampledFunction1D | np.ndarray:
        if isinstance(phi, SampledFunction1D):
            self._check_grid(phi.grid)
            return phi.with_values(self.matrix @ phi.values)
        return self.matrix @ phi

    def expectation(self, phi: SampledFunction1D | np.ndarray) -> complex:
        """``<phi|A|phi>`` by grid quadrature"""
        values = phi.values if isinstance(phi, SampledFunction1D) else np.asarray(phi)
        return complex(self.grid.dx * np.vdot(values, self.matrix @ values))

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix.from_matrix(self.grid, self.matrix.conj().T, flags=self.flags)

    def _check_grid(self, grid: LineGrid) -> None:
        if not self.grid.matches(grid):
            raise GridMismatchError("Operator and operand live on different grids")

    def _combine(self, other: "OperatorMatrix", matrix: np.ndarray) -> "OperatorMatrix":
        self._check_grid(other.grid)
        return OperatorMatrix.from_matrix(self.grid, matrix, flags=(*self.flags, *other.flags))

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return self._combine(other, self.matrix + other.matrix)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return self._combine(other, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "OperatorMatrix":
        return OperatorMatrix.from_matrix(self.grid, self.matrix * scalar, flags=self.flags)

    __rmul__ = __mul__

    def __neg__(self) -> "OperatorMatrix":
        return self * -1

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if other.grid.n != self.grid.n:
            raise GridMismatchError("Operator sizes differ")
        return self._combine(other, self.matrix @ other.matrix)


def commutator(A: OperatorMatrix, B: OperatorMatrix) -> OperatorMatrix:
    """``AB - BA``"""
    if not A.grid.matches(B.grid):
        raise GridMismatchError("Commutator of operators on different grids")
    return A @ B - B @ A


def _symmetrized(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.conj().T) / 2


def _shift_matrices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Superdiagonal and subdiagonal unit shifts, zero beyond the grid ends"""
    return np.eye(n, k=1), np.eye(n, k=-1)


def position_matrix(grid: LineGrid) -> OperatorMatrix:
    return OperatorMatrix.diagonal(grid.points, grid)


def momentum_matrix(grid: LineGrid, scheme: Scheme | str = Scheme.spectral) -> OperatorMatrix:
    """
    ``P = -i d/dx``.

    The spectral scheme multiplies by ``k`` on the dual grid (Nyquist mode dropped)
    and is periodic; central differences are tridiagonal with zero boundary values.
    """
    scheme = Scheme(scheme)
    if scheme == Scheme.spectral:
        symbol = grid.dual().points.copy()
        symbol[0] = 0
        matrix = _symmetrized(fourier_multiplier_matrix(grid, symbol))
    else:
        up, down = _shift_matrices(grid.n)
        matrix = -1j / (2 * grid.dx) * (up - down)
    return OperatorMatrix.from_matrix(grid, matrix)


def kinetic_matrix(grid: LineGrid, scheme: Scheme | str = Scheme.spectral) -> OperatorMatrix:
    """``P² = -d²/dx²``"""
    scheme = Scheme(scheme)
    if scheme == Scheme.spectral:
        symbol = grid.dual().points ** 2
        matrix = _symmetrized(fourier_multiplier_matrix(grid, symbol)).real
    else:
        up, down = _shift_matrices(grid.n)
        matrix = -(up - 2 * np.eye(grid.n) + down) / grid.dx**2
    return OperatorMatrix.from_matrix(grid, matrix)


def momentum_function_matrix(grid: LineGrid, symbol: np.ndarray) -> OperatorMatrix:
    """``g(P)`` for ``symbol = g`` sampled on the dual grid"""
    matrix = fourier_multiplier_matrix(grid, symbol)
    if not np.any(np.asarray(symbol).imag):
        matrix = _symmetrized(matrix)
    return OperatorMatrix.from_matrix(grid, matrix)
