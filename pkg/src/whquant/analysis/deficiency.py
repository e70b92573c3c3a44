"""
Deficiency indices of the weighted momentum ``P_a = -i a d/dx (a .)``.

Solutions of ``P_a^* g = ±i g`` reduce, through ``h = a g``, to ``h' = ∓h / a²``, so::

    log |g(x)|² = ∓2 S(x) - 2 log a(x),    S(x) = integral_0^x a(t)^-2 dt

Everything is accumulated in log space: ``a^-2`` overflows double precision in Gaussian
tails long before the verdict is settled. A branch is normalizable when its L² mass stops
growing over a sequence of widening windows.
"""

import logging
import math
from typing import Literal, TypeAlias

import numpy as np
from scipy.special import logsumexp

from whquant.base import ArrayModel
from whquant.const import (
    DEFICIENCY_WINDOWS,
    GROWTH_THRESHOLD,
    INTERVAL_MARGINS,
    NORMALIZABLE_TOL,
)
from whquant.exceptions import PreconditionError
from whquant.grid import LineGrid, SampledFunction1D
from whquant.mollifiers import IntervalSet
from whquant.types import DomainKind, Verdict

logger = logging.getLogger(__name__)

Domain: TypeAlias = Literal["whole_line"] | IntervalSet


class DeficiencyBranch(ArrayModel):
    sign: int
    """+1 for ``+i``, -1 for ``-i``"""
    windows: tuple[float, ...]
    """Half-widths (whole line) or end margins (interval) of the integration windows"""
    log_masses: tuple[float, ...]
    log_norm_growth: float
    """Increment of the log mass between the last two windows"""
    normalizable: bool | None
    """``None`` when the growth is neither clearly bounded nor clearly divergent"""


class DeficiencyReport(ArrayModel):
    domain_kind: DomainKind
    plus_branch: DeficiencyBranch | None = None
    minus_branch: DeficiencyBranch | None = None
    indices_estimate: tuple[int, int] | None = None
    verdict: Verdict
    zeros: tuple[float, ...] = ()
    """Nodes where the weight vanishes"""


def _classify(growth: float, threshold: float, tol: float) -> bool | None:
    if growth > threshold:
        return False
    if abs(growth) <= tol:
        return True
    return None


def _branch(
    sign: int, windows: list[float], log_masses: list[float], threshold: float, tol: float
) -> DeficiencyBranch:
    last, previous = log_masses[-1], log_masses[-2]
    growth = math.inf if math.isinf(last) and last > 0 else last - previous
    return DeficiencyBranch(
        sign=sign,
        windows=tuple(windows),
        log_masses=tuple(log_masses),
        log_norm_growth=growth,
        normalizable=_classify(growth, threshold, tol),
    )


def _log_mass(log_density: np.ndarray, dx: float) -> float:
    if log_density.size == 0:
        return -math.inf
    if np.any(np.isposinf(log_density)):
        return math.inf
    return float(logsumexp(log_density)) + math.log(dx)


def _log_cumulative_from_origin(log_integrand: np.ndarray, grid: LineGrid) -> np.ndarray:
    """
    ``log |integral_0^x exp(log_integrand)|`` at every node, by rectangle sums
    outward from the node nearest the origin
    """
    i0 = grid.index_of(0.0)
    terms = log_integrand + math.log(grid.dx)
    out = np.full(grid.n, -np.inf)
    if i0 + 1 < grid.n:
        out[i0 + 1 :] = np.logaddexp.accumulate(terms[i0 + 1 :])
    if i0 > 0:
        out[:i0] = np.logaddexp.accumulate(terms[:i0][::-1])[::-1]
    return out


def _whole_line(
    log_a: np.ndarray,
    grid: LineGrid,
    windows: tuple[float, ...],
    threshold: float,
    tol: float,
) -> DeficiencyReport:
    x = grid.points
    span = min(-grid.x_min, grid.x_max - grid.dx)
    usable = [L for L in windows if L <= span]
    if len(usable) < 2:
        raise PreconditionError(
            f"Need at least two windows inside the grid half-width {span:g}, have {usable}"
        )

    log_s = _log_cumulative_from_origin(-2 * log_a, grid)
    side = np.sign(x - x[grid.index_of(0.0)])
    with np.errstate(over="ignore"):
        s = side * np.exp(log_s)

    branches = []
    for sign in (1, -1):
        with np.errstate(invalid="ignore"):
            log_g2 = -2 * sign * s - 2 * log_a
        log_g2 = np.nan_to_num(log_g2, nan=-np.inf, posinf=np.inf, neginf=-np.inf)
        masses = [_log_mass(log_g2[np.abs(x) <= L], grid.dx) for L in usable]
        branches.append(_branch(sign, usable, masses, threshold, tol))
    return _report(DomainKind.whole_line, *branches)


def _interval(
    a: SampledFunction1D | None,
    E: IntervalSet,
    threshold: float,
    tol: float,
) -> DeficiencyReport:
    margins = list(INTERVAL_MARGINS)
    if a is None:
        level = 1.0
    else:
        inside = a.values.real[E.mask(a.grid.points)]
        if inside.size == 0:
            raise PreconditionError("No grid nodes inside the interval")
        if np.any(inside <= 0):
            zeros = a.grid.points[E.mask(a.grid.points)][inside <= 0]
            return DeficiencyReport(
                domain_kind=DomainKind.interval,
                verdict=Verdict.inconclusive,
                zeros=tuple(float(z) for z in zeros),
            )
        level = float(inside[0]) if np.ptp(inside) <= 1e-12 else math.nan

    branches = []
    for sign in (1, -1):
        if not math.isnan(level):
            # |g|² = exp(∓2 (x - alpha) / c²) in closed form
            k = 2 * sign / level**2
            masses = [_log_interval_exp_mass(k, E, m * E.width) for m in margins]
        else:
            assert a is not None
            masses = [_log_interval_quadrature(a, E, sign, m * E.width) for m in margins]
        branches.append(_branch(sign, margins, masses, threshold, tol))
    return _report(DomainKind.interval, *branches)


def _log_interval_exp_mass(k: float, E: IntervalSet, margin: float) -> float:
    """``log integral exp(-k (x - alpha)) dx`` over ``[alpha + margin, beta - margin]``"""
    lo, hi = margin, E.width - margin
    if k == 0:
        return math.log(hi - lo)
    # log((exp(-k lo) - exp(-k hi)) / k), stable for either sign of k
    if k > 0:
        return -k * lo + math.log(-math.expm1(-k * (hi - lo))) - math.log(k)
    return -k * hi + math.log(-math.expm1(k * (hi - lo))) - math.log(-k)


def _log_interval_quadrature(
    a: SampledFunction1D, E: IntervalSet, sign: int, margin: float
) -> float:
    grid = a.grid
    x = grid.points
    mask = (x >= E.alpha + margin) & (x <= E.beta - margin)
    log_a = np.log(a.values.real[mask])
    terms = -2 * log_a + math.log(grid.dx)
    log_s = np.logaddexp.accumulate(terms)
    with np.errstate(over="ignore"):
        s = np.exp(log_s)
    return _log_mass(-2 * sign * s - 2 * log_a, grid.dx)


def _report(
    domain_kind: DomainKind, plus: DeficiencyBranch, minus: DeficiencyBranch
) -> DeficiencyReport:
    if plus.normalizable is None or minus.normalizable is None:
        verdict, indices = Verdict.inconclusive, None
    else:
        indices = (int(plus.normalizable), int(minus.normalizable))
        if indices == (0, 0):
            verdict = Verdict.essentially_self_adjoint
        elif indices == (1, 1):
            verdict = Verdict.deficient
        else:
            verdict = Verdict.inconclusive
    logger.info(
        "Deficiency (%s): growth +%s / -%s -> %s",
        domain_kind,
        plus.log_norm_growth,
        minus.log_norm_growth,
        verdict,
    )
    return DeficiencyReport(
        domain_kind=domain_kind,
        plus_branch=plus,
        minus_branch=minus,
        indices_estimate=indices,
        verdict=verdict,
    )


def deficiency_analysis(
    a: SampledFunction1D | None,
    domain: Domain = "whole_line",
    log_a: SampledFunction1D | None = None,
    windows: tuple[float, ...] = DEFICIENCY_WINDOWS,
    growth_threshold: float = GROWTH_THRESHOLD,
    normalizable_tol: float = NORMALIZABLE_TOL,
) -> DeficiencyReport:
    """
    Estimate the deficiency indices of ``P_a`` on the whole line or on an interval.

    Args:
        a: the weight. May be ``None`` on an interval, meaning the indicator of it.
        domain: ``"whole_line"`` or the interval
        log_a: ``log a`` on the grid, used instead of ``a`` on the whole line when ``a``
            underflows in its tails (see :func:`.gaussian_window_log`)
        windows: half-widths ``L`` of the windows ``[-L, L]`` on the whole line; those not
            fitting the grid are skipped
        growth_threshold: log mass increment above which a branch is non-normalizable
        normalizable_tol: log mass increment below which a branch is normalizable

    On the whole line, a weight vanishing at any node gives an inconclusive verdict
    listing the zeros. On an interval where ``a`` is constant the masses of
    ``exp(∓2x/c²)`` are taken in closed form over windows trimmed by shrinking margins.
    """
    if isinstance(domain, IntervalSet):
        return _interval(a, domain, growth_threshold, normalizable_tol)
    if domain != "whole_line":
        raise PreconditionError(f"Unknown domain {domain!r}")

    if log_a is not None:
        grid = log_a.grid
        values = log_a.values.real
    elif a is not None:
        grid = a.grid
        if np.max(np.abs(a.values.imag)) > 0:
            raise PreconditionError("Weight must be real")
        with np.errstate(divide="ignore"):
            values = np.log(np.clip(a.values.real, 0, None))
    else:
        raise PreconditionError("Need a weight or its logarithm on the whole line")

    zero_mask = np.isneginf(values)
    if np.any(zero_mask):
        zeros = tuple(float(z) for z in grid.points[zero_mask])
        logger.info("Weight vanishes at %d nodes, deficiency inconclusive", len(zeros))
        return DeficiencyReport(
            domain_kind=DomainKind.whole_line, verdict=Verdict.inconclusive, zeros=zeros
        )
    return _whole_line(values, grid, windows, growth_threshold, normalizable_tol)
