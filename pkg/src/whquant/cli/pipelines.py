"""
One pipeline per command: run the library on a :class:`.RunConfig` and collect tables,
plot fields and warning flags for the output stage.
"""

import logging
import time
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from typing import Literal

import numpy as np
import pandas as pd

from whquant.analysis import (
    compare_spectra,
    deficiency_analysis,
    spectrum,
    weighted_operator,
    well_reference_spectrum,
)
from whquant.apodization import (
    Apodization,
    pure_state_apodization,
    validate_assumptions,
    weyl_wigner_apodization,
    wigner_function,
)
from whquant.base import ArrayModel
from whquant.cli.config import Command, Observable, RunConfig, WeightKind
from whquant.const import ASSUMPTION_TOL
from whquant.evolution import compare_evolutions
from whquant.grid import LineGrid, PhaseGrid, SampledFunction1D, SampledFunction2D
from whquant.mollifiers import gaussian_window_closed_form, gaussian_window_log, smooth_indicator
from whquant.portrait import portrait_convolution, portrait_trace
from whquant.quantizer import deformed_ccr_profile, kernel, truncated_observables, window_function
from whquant.states import gaussian_packet, load_tabulated, normalize, preset_state
from whquant.types import ApodizationKind, DomainKind, RealArray

logger = logging.getLogger(__name__)

PORTRAIT_SAMPLES = (-2.0, -1.0, 0.0, 1.0, 2.0)
"""Sample coordinates (snapped to grid nodes) for trace portraits, on both axes"""


class PlotSpec(ArrayModel):
    name: str
    kind: Literal["line", "heatmap"]
    title: str
    xlabel: str
    ylabel: str
    x: RealArray
    series: dict[str, RealArray] = {}
    """Line plots: label -> values over ``x``"""
    y: RealArray | None = None
    z: RealArray | None = None
    """Heatmaps: values indexed ``[i_x, i_y]``"""


class PipelineResult(ArrayModel):
    command: Command
    tables: dict[str, pd.DataFrame]
    plots: tuple[PlotSpec, ...] = ()
    flags: tuple[str, ...] = ()
    timings: dict[str, float] = {}


class _Stages:
    """Stage timer and flag collector for one pipeline run"""

    def __init__(self) -> None:
        self.timings: dict[str, float] = {}
        self.flags: list[str] = []

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = time.perf_counter() - start
            logger.debug("Stage %s took %.3fs", name, self.timings[name])

    def flag(self, *flags: str) -> None:
        for flag in flags:
            if flag not in self.flags:
                self.flags.append(flag)


def _apodization(config: RunConfig, grid: LineGrid) -> Apodization:
    phase = PhaseGrid.from_line(grid)
    if config.apodization.kind == ApodizationKind.weyl_wigner:
        return weyl_wigner_apodization(phase)
    if config.apodization.psi_file is not None:
        psi = load_tabulated(config.apodization.psi_file, grid)
    else:
        assert config.apodization.psi_preset is not None
        psi = normalize(preset_state(config.apodization.psi_preset, grid))
    return pure_state_apodization(psi, phase)


def _weight(config: RunConfig, grid: LineGrid, sigma: float | None) -> SampledFunction1D:
    if config.weight == WeightKind.constant:
        return SampledFunction1D(grid=grid, values=np.ones(grid.n))
    E = config.interval
    if config.weight == WeightKind.indicator:
        return E.indicator(grid)
    if config.weight == WeightKind.gaussian_window:
        return gaussian_window_closed_form(E, grid)
    assert sigma is not None
    return smooth_indicator(E, sigma, grid).values


def _label(sigma: float | None, config: RunConfig) -> str:
    if config.weight == WeightKind.smooth_indicator and sigma is not None:
        return f"sigma={sigma:g}"
    return str(config.weight)


def run_window(config: RunConfig, progress: bool = False) -> PipelineResult:
    stages = _Stages()
    grid = config.grid.to_grid()
    E = config.interval
    with stages.stage("apodization"):
        apod = _apodization(config, grid)
    frames, series = [], {}
    with stages.stage("window"):
        for sigma in config.sigmas:
            u = smooth_indicator(E, sigma, grid)
            w = window_function(u, apod)
            stages.flag(*w.flags)
            frames.append(
                pd.DataFrame(
                    {"sigma": sigma, "x": grid.points, "u": u.values.real, "w": w.values.real}
                )
            )
            series[f"u, sigma={sigma:g}"] = u.values.real
            series[f"w, sigma={sigma:g}"] = w.values.real
    plot = PlotSpec(
        name="window",
        kind="line",
        title=f"Window profiles on ({E.alpha:g}, {E.beta:g})",
        xlabel="x",
        ylabel="weight",
        x=grid.points,
        series=series,
    )
    return PipelineResult(
        command=config.command,
        tables={"window": pd.concat(frames, ignore_index=True)},
        plots=(plot,),
        flags=(*apod.flags, *stages.flags),
        timings=stages.timings,
    )


def run_quantize(config: RunConfig, progress: bool = False) -> PipelineResult:
    stages = _Stages()
    grid = config.grid.to_grid()
    E = config.interval
    with stages.stage("apodization"):
        apod = _apodization(config, grid)
    frames, series = [], {}
    with stages.stage("quantize"):
        for sigma in config.sigmas:
            obs = truncated_observables(E, sigma, apod, grid, config.scheme)
            profiles = obs.profiles
            ccr = deformed_ccr_profile(profiles)
            for name, op in (("A_p", obs.a_p), ("A_p2", obs.a_p2)):
                if not op.hermitian:
                    stages.flag(
                        f"{name} at sigma={sigma:g} not Hermitian, residual "
                        f"{op.hermitian_residual:.3e}"
                    )
            stages.flag(*profiles.w.flags)
            frames.append(
                pd.DataFrame(
                    {
                        "sigma": sigma,
                        "x": grid.points,
                        "u": obs.weight.values.values.real,
                        "w": profiles.w.values.real,
                        "b": profiles.b.values.real,
                        "c_real": profiles.c.values.real,
                        "c_imag": profiles.c.values.imag,
                        "d_real": profiles.d.values.real,
                        "d_imag": profiles.d.values.imag,
                        "ccr_imag": ccr.values.imag,
                    }
                )
            )
            series[f"w, sigma={sigma:g}"] = profiles.w.values.real
            series[f"[A_q, A_p]/i, sigma={sigma:g}"] = ccr.values.imag
    plot = PlotSpec(
        name="profiles",
        kind="line",
        title="Window and commutator profiles",
        xlabel="x",
        ylabel="profile",
        x=grid.points,
        series=series,
    )
    return PipelineResult(
        command=config.command,
        tables={"profiles": pd.concat(frames, ignore_index=True)},
        plots=(plot,),
        flags=(*apod.flags, *stages.flags),
        timings=stages.timings,
    )


def run_spectrum(config: RunConfig, progress: bool = False) -> PipelineResult:
    stages = _Stages()
    grid = config.grid.to_grid()
    E = config.interval
    sigmas = config.sigmas or (None,)
    # the sharpest member of a sweep is tabulated
    sigma = sigmas[-1]
    with stages.stage("operator"):
        op = weighted_operator(_weight(config, grid, sigma), config.operator, grid, config.scheme)
    with stages.stage("spectrum"):
        result = spectrum(op.matrix, k=config.n_eigen)
    table = pd.DataFrame(
        {
            "index": np.arange(len(result.eigenvalues)),
            "eigenvalue": result.eigenvalues,
            "residual": result.residuals,
            "mass_in_E": result.mass_in(E),
        }
    )
    tables = {"spectrum": table}
    stages.flag(*op.matrix.flags)

    if len(sigmas) > 1 and config.weight == WeightKind.smooth_indicator:
        with stages.stage("sweep"):
            family = {
                _label(s, config): weighted_operator(
                    _weight(config, grid, s), config.operator, grid, config.scheme
                )
                for s in sigmas
            }
            comparison = compare_spectra(
                family,
                E,
                k=min(config.n_eigen, 3),
                mass_threshold=config.tolerances.mass_in_set,
            )
        stages.flag(*comparison.flags)
        tables["spectrum_comparison"] = pd.DataFrame(
            [row.model_dump() for row in comparison.rows],
            columns=[
                "sharpness",
                "level",
                "eigenvalue",
                "reference",
                "relative_gap",
                "mass_in_set",
            ],
        )

    index = np.arange(len(result.eigenvalues), dtype=float)
    plot = PlotSpec(
        name="spectrum",
        kind="line",
        title=f"Lowest eigenvalues, {config.operator} operator, {_label(sigma, config)}",
        xlabel="index",
        ylabel="eigenvalue",
        x=index,
        series={
            "eigenvalue": result.eigenvalues,
            "well": well_reference_spectrum(E, len(index)),
        },
    )
    return PipelineResult(
        command=config.command,
        tables=tables,
        plots=(plot,),
        flags=tuple(stages.flags),
        timings=stages.timings,
    )


def run_deficiency(config: RunConfig, progress: bool = False) -> PipelineResult:
    stages = _Stages()
    grid = config.grid.to_grid()
    tol = config.tolerances
    kwargs = {"growth_threshold": tol.growth_threshold, "normalizable_tol": tol.normalizable_tol}
    sigma = config.sigmas[-1] if config.sigmas else None
    with stages.stage("deficiency"):
        if config.domain == DomainKind.interval:
            E = config.interval
            a = None
            if config.weight not in (WeightKind.indicator, WeightKind.constant):
                a = _weight(config, grid, sigma)
            report = deficiency_analysis(a, E, **kwargs)
        elif config.weight == WeightKind.gaussian_window:
            log_a = gaussian_window_log(config.interval, grid)
            report = deficiency_analysis(None, "whole_line", log_a=log_a, **kwargs)
        else:
            report = deficiency_analysis(_weight(config, grid, sigma), "whole_line", **kwargs)

    indices = report.indices_estimate
    table = pd.DataFrame(
        {
            "domain": [str(report.domain_kind)],
            "verdict": [str(report.verdict)],
            "n_plus": pd.array([indices[0] if indices else None], dtype="Int64"),
            "n_minus": pd.array([indices[1] if indices else None], dtype="Int64"),
            "log_growth_plus": [
                report.plus_branch.log_norm_growth if report.plus_branch else np.nan
            ],
            "log_growth_minus": [
                report.minus_branch.log_norm_growth if report.minus_branch else np.nan
            ],
            "n_zeros": [len(report.zeros)],
        }
    )
    if report.zeros:
        stages.flag(f"weight vanishes at {len(report.zeros)} nodes")

    plots = []
    if report.plus_branch and report.minus_branch:
        windows = np.asarray(report.plus_branch.windows)
        series = {}
        for name, branch in (("+i", report.plus_branch), ("-i", report.minus_branch)):
            masses = np.asarray(branch.log_masses)
            # overflowed masses are left out of the plot
            series[f"log mass, {name}"] = np.where(np.isfinite(masses), masses, 0.0)
            if not np.all(np.isfinite(masses)):
                stages.flag(f"{name} branch: log mass overflowed, plotted as 0")
        plots.append(
            PlotSpec(
                name="deficiency",
                kind="line",
                title=f"Deficiency branches ({report.domain_kind}): {report.verdict}",
                xlabel="window",
                ylabel="log L2 mass",
                x=windows,
                series=series,
            )
        )
    return PipelineResult(
        command=config.command,
        tables={"deficiency": table},
        plots=tuple(plots),
        flags=tuple(stages.flags),
        timings=stages.timings,
    )


def _observable(config: RunConfig, phase: PhaseGrid) -> SampledFunction2D:
    def _fn(q: np.ndarray, p: np.ndarray) -> np.ndarray:
        if config.observable == Observable.gaussian:
            return np.exp(-(q**2 + p**2) / 2)
        cutoff = np.exp(-(q**2 + p**2) / 8)
        return (q if config.observable == Observable.q_gaussian else p) * cutoff

    return SampledFunction2D.from_callable(phase, _fn)


def run_portrait(config: RunConfig, progress: bool = False) -> PipelineResult:
    stages = _Stages()
    grid = config.grid.to_grid()
    with stages.stage("apodization"):
        apod = _apodization(config, grid)
    phase = apod.phase_grid
    f = _observable(config, phase)
    with stages.stage("convolution"):
        convolution = portrait_convolution(f, apod)
    with stages.stage("kernel"):
        A = kernel(f, apod, progress=progress)
    q_nodes = [float(phase.q_axis.points[phase.q_axis.index_of(v)]) for v in PORTRAIT_SAMPLES]
    p_nodes = [float(phase.p_axis.points[phase.p_axis.index_of(v)]) for v in PORTRAIT_SAMPLES]
    points = [(q, p) for q in q_nodes for p in p_nodes]
    with stages.stage("trace"):
        trace = portrait_trace(A, apod, points, grid=phase)
    assert trace.samples is not None and convolution.values is not None
    conv_samples = convolution.sample(points)
    table = pd.DataFrame(
        {
            "q": [q for q, _ in points],
            "p": [p for _, p in points],
            "convolution": conv_samples.real,
            "trace": trace.samples.real,
            "abs_diff": np.abs(conv_samples - trace.samples),
        }
    )
    if convolution.kernel_min is not None and convolution.kernel_min < 0:
        stages.flag(f"autocorrelation kernel min {convolution.kernel_min:.3e} is negative")
    plot = PlotSpec(
        name="portrait",
        kind="heatmap",
        title=f"Convolution portrait of {config.observable}",
        xlabel="q",
        ylabel="p",
        x=phase.q_axis.points,
        y=phase.p_axis.points,
        z=convolution.values.values.real,
    )
    return PipelineResult(
        command=config.command,
        tables={"portrait": table},
        plots=(plot,),
        flags=(*apod.flags, *f.flags, *convolution.values.flags, *stages.flags),
        timings=stages.timings,
    )


def run_evolve(config: RunConfig, progress: bool = False) -> PipelineResult:
    stages = _Stages()
    grid = config.grid.to_grid()
    E = config.interval
    assert config.times is not None
    width = config.packet_width if config.packet_width is not None else E.width / 14
    psi0 = normalize(gaussian_packet(grid, E.midpoint, width))
    sigmas = config.sigmas or (None,)
    with stages.stage("operators"):
        family = {
            _label(sigma, config): weighted_operator(
                _weight(config, grid, sigma), "kinetic", grid, config.scheme
            )
            for sigma in sigmas
        }
    with stages.stage("evolve"):
        comparison = compare_evolutions(E, family, psi0, config.times)
    stages.flag(*comparison.flags)
    table = pd.DataFrame(
        [row.model_dump() for row in comparison.rows],
        columns=["label", "time", "fidelity", "renormalization", "leakage", "mean_x_gap"],
    )
    times = np.asarray(config.times, dtype=float)
    series = {
        label: table.loc[table["label"] == label, "fidelity"].to_numpy() for label in family
    }
    plot = PlotSpec(
        name="fidelity",
        kind="line",
        title=f"Fidelity against the well on ({E.alpha:g}, {E.beta:g})",
        xlabel="t",
        ylabel="fidelity",
        x=times,
        series=series,
    )
    return PipelineResult(
        command=config.command,
        tables={"evolution": table},
        plots=(plot,),
        flags=tuple(stages.flags),
        timings=stages.timings,
    )


def run_validate_apodization(config: RunConfig, progress: bool = False) -> PipelineResult:
    stages = _Stages()
    grid = config.grid.to_grid()
    with stages.stage("apodization"):
        apod = _apodization(config, grid)
        report = validate_assumptions(apod)
    rows = [
        {
            "check": name,
            "passed": check.passed,
            "extremum": check.extremum if check.extremum is not None else np.nan,
            "distributional": check.distributional,
            "detail": check.detail,
        }
        for name, check in (
            ("a1_nonneg_fs", report.a1_nonneg_fs),
            ("a2_smoothness_proxy", report.a2_smoothness_proxy),
            ("a3_nonneg_partial_at_q0", report.a3_nonneg_partial_at_q0),
        )
    ]
    if apod.psi is not None:
        with stages.stage("wigner"):
            wigner = wigner_function(apod.psi, apod.phase_grid)
        w_min = float(np.min(wigner.values.real))
        rows.append(
            {
                "check": "wigner_nonneg",
                "passed": w_min >= -ASSUMPTION_TOL,
                "extremum": w_min,
                "distributional": False,
                "detail": "minimum of the fiducial state's Wigner function",
            }
        )
    plot = PlotSpec(
        name="apodization",
        kind="heatmap",
        title=f"Re Pi(q, p), {apod.kind}",
        xlabel="q",
        ylabel="p",
        x=apod.phase_grid.q_axis.points,
        y=apod.phase_grid.p_axis.points,
        z=apod.pi_values.values.real,
    )
    return PipelineResult(
        command=config.command,
        tables={"apodization": pd.DataFrame(rows)},
        plots=(plot,),
        flags=(*apod.flags, *stages.flags),
        timings=stages.timings,
    )


PIPELINES: dict[Command, Callable[[RunConfig, bool], PipelineResult]] = {
    Command.window: run_window,
    Command.quantize: run_quantize,
    Command.spectrum: run_spectrum,
    Command.deficiency: run_deficiency,
    Command.portrait: run_portrait,
    Command.evolve: run_evolve,
    Command.validate_apodization: run_validate_apodization,
}


def run_pipeline(config: RunConfig, progress: bool = False) -> PipelineResult:
    logger.info("Running %s", config.command)
    return PIPELINES[config.command](config, progress)
