from whquant.grid import LineGrid, PhaseGrid, SampledFunction1D, make_line_grid
from whquant.states import gaussian_packet, normalize


def default_line_grid(x_min: float = -16.0, x_max: float = 16.0, n: int = 512) -> LineGrid:
    return make_line_grid(x_min, x_max, n)


def default_phase_grid(line: LineGrid | None = None) -> PhaseGrid:
    """Self-dual phase grid over ``line``"""
    return PhaseGrid.from_line(line if line is not None else default_line_grid())


def sample_states(grid: LineGrid | None = None) -> list[SampledFunction1D]:
    """
    Five decaying, grid-normalized packets with different centers, widths and momenta,
    all well inside ``(-6, 6)``.
    """
    grid = grid if grid is not None else default_line_grid()
    params = [
        (0.0, 1.0, 0.0),
        (1.0, 0.7, 0.5),
        (-1.5, 1.2, -1.0),
        (0.5, 0.5, 2.0),
        (2.0, 0.9, -0.3),
    ]
    return [normalize(gaussian_packet(grid, c, w, k)) for c, w, k in params]


__all__ = ["default_line_grid", "default_phase_grid", "gaussian_packet", "sample_states"]
