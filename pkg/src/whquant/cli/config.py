"""
Run configuration, loaded from TOML.

Every table rejects unknown keys, so a config file is a complete record of a run.
"""

import hashlib
import json
import tomllib
from enum import StrEnum
from pathlib import Path
from typing import Self

from pydantic import Field, FilePath, PositiveFloat, model_validator

from whquant.base import ConfiguredBase
from whquant.const import GROWTH_THRESHOLD, MASS_IN_SET, NORMALIZABLE_TOL
from whquant.grid import LineGrid, make_line_grid
from whquant.mollifiers import IntervalSet
from whquant.states import PsiPreset
from whquant.types import ApodizationKind, DomainKind, GridSize, OperatorKind, Scheme


class Command(StrEnum):
    window = "window"
    quantize = "quantize"
    spectrum = "spectrum"
    deficiency = "deficiency"
    portrait = "portrait"
    evolve = "evolve"
    validate_apodization = "validate-apodization"


class WeightKind(StrEnum):
    """Position weight used by the spectrum, deficiency and evolve commands"""

    smooth_indicator = "smooth_indicator"
    indicator = "indicator"
    gaussian_window = "gaussian_window"
    constant = "constant"


class Observable(StrEnum):
    """Phase space observables for the portrait command"""

    gaussian = "gaussian"
    """``exp(-(q² + p²)/2)``"""
    q_gaussian = "q_gaussian"
    """``q exp(-(q² + p²)/8)``"""
    p_gaussian = "p_gaussian"
    """``p exp(-(q² + p²)/8)``"""


class GridConfig(ConfiguredBase):
    x_min: float
    x_max: float
    n: GridSize

    @model_validator(mode="after")
    def ordered(self) -> Self:
        assert self.x_max > self.x_min, "grid needs x_max > x_min"
        return self

    def to_grid(self) -> LineGrid:
        return make_line_grid(self.x_min, self.x_max, self.n)


class ApodizationConfig(ConfiguredBase):
    kind: ApodizationKind = ApodizationKind.pure_state
    psi_preset: PsiPreset | None = PsiPreset.gaussian_ground
    psi_file: FilePath | None = None
    """Two-column ``x, value`` table, used instead of the preset"""


class SetConfig(ConfiguredBase):
    alpha: float
    beta: float

    @model_validator(mode="after")
    def ordered(self) -> Self:
        assert self.alpha < self.beta, f"set needs alpha < beta, got ({self.alpha}, {self.beta})"
        return self

    def to_interval(self) -> IntervalSet:
        return IntervalSet(alpha=self.alpha, beta=self.beta)


class Tolerances(ConfiguredBase):
    growth_threshold: PositiveFloat = GROWTH_THRESHOLD
    normalizable_tol: PositiveFloat = NORMALIZABLE_TOL
    mass_in_set: float = Field(default=MASS_IN_SET, gt=0, le=1)


_NEEDS_SET = {
    Command.window,
    Command.quantize,
    Command.spectrum,
    Command.evolve,
}


class RunConfig(ConfiguredBase):
    command: Command
    grid: GridConfig
    apodization: ApodizationConfig = ApodizationConfig()
    set_: SetConfig | None = Field(default=None, alias="set")
    sigma: float | None = Field(default=None, ge=0)
    sigma_sweep: tuple[PositiveFloat, ...] | None = None
    """Mollifier radii, read in order of increasing sharpness (decreasing sigma)"""
    scheme: Scheme = Scheme.spectral
    weight: WeightKind = WeightKind.smooth_indicator
    operator: OperatorKind = OperatorKind.kinetic
    domain: DomainKind = DomainKind.whole_line
    n_eigen: int = Field(default=6, ge=1)
    times: tuple[float, ...] | None = None
    packet_width: PositiveFloat | None = None
    """Width of the initial Gaussian for ``evolve``; width of the set / 14 by default"""
    observable: Observable = Observable.gaussian
    output_dir: Path = Path("whquant-output")
    emit_plots: bool = False
    tolerances: Tolerances = Tolerances()

    @model_validator(mode="after")
    def command_requirements(self) -> Self:
        if self.command in _NEEDS_SET or self.domain == DomainKind.interval:
            assert self.set_ is not None, f"{self.command} needs a [set] table"
        if self.command == Command.deficiency and self.weight != WeightKind.constant:
            assert self.set_ is not None, f"a {self.weight} weight needs a [set] table"
        smooth_weight = self.weight == WeightKind.smooth_indicator and self.command in (
            Command.spectrum,
            Command.deficiency,
            Command.evolve,
        )
        if smooth_weight or self.command in (Command.window, Command.quantize):
            assert self.sigmas, f"{self.command} needs sigma or sigma_sweep"
        if self.command == Command.evolve:
            assert self.times, "evolve needs a nonempty times list"
            assert list(self.times) == sorted(set(self.times)), "times must strictly increase"
        if self.apodization.kind == ApodizationKind.weyl_wigner:
            assert self.command != Command.portrait, "trace portraits need a pure_state apodization"
        return self

    @property
    def sigmas(self) -> tuple[float, ...]:
        """``sigma_sweep`` sorted by decreasing sigma, or the single ``sigma``"""
        if self.sigma_sweep:
            return tuple(sorted(self.sigma_sweep, reverse=True))
        return (self.sigma,) if self.sigma is not None else ()

    @property
    def interval(self) -> IntervalSet:
        assert self.set_ is not None
        return self.set_.to_interval()

    @classmethod
    def from_toml(cls, path: Path) -> "RunConfig":
        """
        Load a config file. Relative ``psi_file`` paths are resolved against the
        config's directory.
        """
        path = Path(path)
        with open(path, "rb") as f:
            data = tomllib.load(f)
        apod = data.get("apodization")
        if isinstance(apod, dict) and "psi_file" in apod:
            psi_file = Path(apod["psi_file"])
            if not psi_file.is_absolute():
                apod["psi_file"] = str(path.parent / psi_file)
        return cls.model_validate(data)

    def config_hash(self) -> str:
        """sha256 of the canonical JSON form of the config"""
        canonical = json.dumps(
            self.model_dump(mode="json", by_alias=True), sort_keys=True, separators=(",", ":")
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
