from whquant.testing.fabricators import (
    default_line_grid,
    default_phase_grid,
    gaussian_packet,
    sample_states,
)

__all__ = [
    "default_line_grid",
    "default_phase_grid",
    "gaussian_packet",
    "sample_states",
]
