"""
Unitary evolution by eigenbasis expansion, for weighted kinetic operators on the line and
for the Dirichlet well on an interval, and their comparison.
"""

import logging
import math
from collections.abc import Mapping, Sequence
from typing import Self

import numpy as np
from pydantic import model_validator

from whquant.analysis.weighted import WeightedOperator, well_reference_spectrum
from whquant.base import ArrayModel
from whquant.const import NORMALIZATION_TOL, SUPPORT_TOL
from whquant.exceptions import GridMismatchError, NotHermitianError, PreconditionError
from whquant.grid import LineGrid, SampledFunction1D
from whquant.mollifiers import IntervalSet
from whquant.operator import OperatorMatrix
from whquant.types import RealArray

logger = logging.getLogger(__name__)


class TrajectoryRecord(ArrayModel):
    time: float
    norm: float
    mean_x: float
    mean_x2: float
    energy: float
    leakage: float | None = None
    """Mass outside the interval, when one was given"""


class Trajectory(ArrayModel):
    times: RealArray
    states: tuple[SampledFunction1D, ...]
    records: tuple[TrajectoryRecord, ...]
    flags: tuple[str, ...] = ()

    @model_validator(mode="after")
    def consistent(self) -> Self:
        assert len(self.states) == len(self.times) == len(self.records), "One state per time"
        assert np.all(np.diff(self.times) > 0), "Times must be strictly increasing"
        return self

    @property
    def norms(self) -> np.ndarray:
        return np.array([r.norm for r in self.records])

    @property
    def energies(self) -> np.ndarray:
        return np.array([r.energy for r in self.records])

    @property
    def leakages(self) -> np.ndarray:
        return np.array([np.nan if r.leakage is None else r.leakage for r in self.records])


class EvolutionRow(ArrayModel):
    label: str
    time: float
    fidelity: float
    """``|<psi_well, psi_line restricted to E>|`` after renormalizing the restriction"""
    renormalization: float
    """Norm of the line state's restriction to E"""
    leakage: float
    mean_x_gap: float


class EvolutionComparison(ArrayModel):
    rows: tuple[EvolutionRow, ...]
    trend_monotone: bool
    """Whether the final-time fidelity moves monotonically along the family"""
    flags: tuple[str, ...] = ()


def leakage(psi: SampledFunction1D, E: IntervalSet) -> float:
    """Mass of ``psi`` outside ``E``"""
    outside = ~E.mask(psi.grid.points)
    return float(psi.grid.dx * np.sum(np.abs(psi.values[outside]) ** 2))


def _record(
    psi: SampledFunction1D, t: float, energy: float, E: IntervalSet | None
) -> TrajectoryRecord:
    density = np.abs(psi.values) ** 2 * psi.grid.dx
    x = psi.grid.points
    return TrajectoryRecord(
        time=t,
        norm=psi.norm(),
        mean_x=float(np.sum(x * density)),
        mean_x2=float(np.sum(x**2 * density)),
        energy=energy,
        leakage=leakage(psi, E) if E is not None else None,
    )


def _check_normalized(psi: SampledFunction1D) -> None:
    norm = psi.norm()
    if abs(norm - 1) > NORMALIZATION_TOL:
        raise PreconditionError(f"Initial state must be normalized, measured norm {norm:.12g}")


def _as_times(times: Sequence[float] | np.ndarray) -> np.ndarray:
    return np.atleast_1d(np.asarray(times, dtype=float))


def propagate_eigenbasis(
    H: OperatorMatrix | WeightedOperator,
    psi0: SampledFunction1D,
    times: Sequence[float] | np.ndarray,
    E: IntervalSet | None = None,
) -> Trajectory:
    """
    ``exp(-i t H) psi0`` for each time, from the (cached) eigendecomposition of ``H``.

    Args:
        H: Hermitian operator, or a weighted operator whose matrix is used
        psi0: normalized initial state
        times: strictly increasing times
        E: interval for the leakage record
    """
    if isinstance(H, WeightedOperator):
        H = H.matrix
    if not H.hermitian:
        raise NotHermitianError("Propagation needs a Hermitian generator")
    if not H.grid.matches(psi0.grid):
        raise GridMismatchError("Initial state and generator live on different grids")
    _check_normalized(psi0)

    values, vectors = H.eigensystem
    dx = H.grid.dx
    coefficients = dx * (vectors.conj().T @ psi0.values)
    ts = _as_times(times)
    states, records = [], []
    for t in ts:
        psi = psi0.with_values(vectors @ (np.exp(-1j * values * t) * coefficients))
        states.append(psi)
        records.append(_record(psi, float(t), H.expectation(psi).real, E))
    return Trajectory(times=ts, states=tuple(states), records=tuple(records), flags=psi0.flags)


def _well_modes(E: IntervalSet, grid: LineGrid) -> tuple[np.ndarray, np.ndarray]:
    """Interior node mask and the sine modes sampled there, as columns"""
    if not E.on_grid(grid):
        raise PreconditionError(
            f"Well endpoints ({E.alpha:g}, {E.beta:g}) must be grid nodes for an exact basis"
        )
    x = grid.points
    interior = (x > E.alpha + grid.dx / 2) & (x < E.beta - grid.dx / 2)
    n_modes = int(np.count_nonzero(interior))
    n = np.arange(1, n_modes + 1)
    phases = np.outer(x[interior] - E.alpha, n) * math.pi / E.width
    modes = math.sqrt(2 / E.width) * np.sin(phases)
    return interior, modes


def well_propagate(
    E: IntervalSet, psi0: SampledFunction1D, times: Sequence[float] | np.ndarray
) -> Trajectory:
    """
    Evolution in the infinite well on ``E``: expansion in the Dirichlet sine modes with
    phases ``exp(-i E_n t)``. The discrete sine modes are orthonormal on the interior nodes,
    so the evolution is exactly unitary and revives at ``T = 2 width² / pi``.

    Raises:
        PreconditionError: when ``psi0`` is not supported in ``E`` or not normalized there,
            or the endpoints are not grid nodes
    """
    grid = psi0.grid
    interior, modes = _well_modes(E, grid)
    scale = float(np.max(np.abs(psi0.values))) if psi0.values.size else 0.0
    outside = np.abs(psi0.values[~interior])
    if outside.size and np.max(outside) > SUPPORT_TOL * scale:
        raise PreconditionError("Initial state is not supported inside the well")
    _check_normalized(psi0)

    levels = well_reference_spectrum(E, modes.shape[1])
    coefficients = grid.dx * (modes.T @ psi0.values[interior])
    ts = _as_times(times)
    states, records = [], []
    for t in ts:
        values = np.zeros(grid.n, dtype=complex)
        values[interior] = modes @ (np.exp(-1j * levels * t) * coefficients)
        psi = psi0.with_values(values)
        # energy of the evolved state, projected back onto the modes
        evolved = grid.dx * (modes.T @ values[interior])
        energy = float(np.sum(levels * np.abs(evolved) ** 2))
        states.append(psi)
        records.append(_record(psi, float(t), energy, E))
    return Trajectory(times=ts, states=tuple(states), records=tuple(records))


def revival_time(E: IntervalSet) -> float:
    return 2 * E.width**2 / math.pi


def _is_monotone(values: list[float]) -> bool:
    diffs = np.diff(values)
    return bool(np.all(diffs >= 0) or np.all(diffs <= 0))


def compare_evolutions(
    E: IntervalSet,
    family: Mapping[str, WeightedOperator | OperatorMatrix],
    psi0: SampledFunction1D,
    times: Sequence[float] | np.ndarray,
) -> EvolutionComparison:
    """
    Well evolution against line evolution under each generator of ``family``.

    The line state is restricted to ``E`` and renormalized before taking the overlap;
    the renormalization factor is reported alongside. ``family`` is read in order of
    increasing sharpness, and a non-monotone final fidelity is logged, not raised.
    """
    well = well_propagate(E, psi0, times)
    mask = E.mask(psi0.grid.points)
    dx = psi0.grid.dx
    rows: list[EvolutionRow] = []
    final: dict[str, float] = {}
    for label, H in family.items():
        line = propagate_eigenbasis(H, psi0, times, E)
        for well_state, line_state, well_rec, line_rec in zip(
            well.states, line.states, well.records, line.records
        ):
            restricted = line_state.values[mask]
            r = math.sqrt(dx * float(np.sum(np.abs(restricted) ** 2)))
            overlap = abs(dx * np.vdot(well_state.values[mask], restricted))
            fidelity = min(1.0, overlap / r) if r > 0 else 0.0
            rows.append(
                EvolutionRow(
                    label=str(label),
                    time=line_rec.time,
                    fidelity=fidelity,
                    renormalization=r,
                    leakage=line_rec.leakage if line_rec.leakage is not None else 0.0,
                    mean_x_gap=line_rec.mean_x - well_rec.mean_x,
                )
            )
        final[str(label)] = rows[-1].fidelity

    monotone = _is_monotone(list(final.values()))
    flags: tuple[str, ...] = ()
    if not monotone:
        trend = ", ".join(f"{label}: {value:.6g}" for label, value in final.items())
        t_final = float(_as_times(times)[-1])
        logger.warning("Final fidelity is not monotone along the family: %s", trend)
        flags = (
            f"well vs. line fidelity at t={t_final:g} is not monotone along the family "
            f"order [{trend}]",
        )
    return EvolutionComparison(rows=tuple(rows), trend_monotone=monotone, flags=flags)
