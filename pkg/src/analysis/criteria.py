"""
Tendency selection.

Two criteria pick the level j* whose baseline becomes the tendency T of a
series, leaving the residual r = Y - T:

* STC tests every rotation and picks the first one that the Augmented
  Dickey-Fuller test no longer calls stationary.
* MaxEP tracks the largest extremum prominence of every baseline and stops
  right before its steepest drop.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy.linalg import solve_triangular
from statsmodels.tsa.adfvalues import mackinnonp

from ..core.errors import EmptyDecomposition, NotAnExtremum, RankDeficient, SeriesTooShort
from ..core.itd import ArrayOrSeries, as_values, decompose, extremum_prominences, find_extrema
from ..core.series import BoundaryPolicy, ItdDecomposition, TimeSeries
from ..utils.logging import get_logger

logger = get_logger("criteria")

RANK_RTOL = 1e-10
P_VALUE_FLOOR = 0.001
P_VALUE_CEIL = 0.999
MIN_ADF_SAMPLES = 10


class Criterion(str, Enum):
    """Tendency selection criteria"""
    STC = "stc"
    MAXEP = "maxep"


class AdfVariant(str, Enum):
    CONSTANT_TREND = "ct"


class TendencyParams(BaseModel):
    """Tunables of the selection criteria"""
    p_star: float = Field(0.05, gt=0.0, lt=1.0, description="STC p-value threshold")
    n_lags: int = Field(1, ge=0, description="lagged-difference terms in the ADF regression")


@dataclass(frozen=True)
class AdfResult:
    gamma_hat: float
    t_stat: float
    p_value: float
    n_lags: int
    n_obs: int
    variant: AdfVariant = AdfVariant.CONSTANT_TREND


@dataclass(frozen=True)
class CriterionTrace:
    """Per-level scores: p-values for STC, MaxEP values for MaxEP"""
    criterion: Criterion
    per_level: Tuple[Tuple[int, float], ...]
    chosen: int
    fallback_used: bool = False


@dataclass(frozen=True, eq=False)
class TendencySplit:
    j_star: int
    tendency: TimeSeries
    residual: TimeSeries
    trace: CriterionTrace


# -- least squares / ADF ----------------------------------------------------

def ols_fit(design: np.ndarray, response: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Least squares through a reduced QR factorisation.

    Returns (coefficients, standard errors, unbiased residual variance).
    """
    design = np.asarray(design, dtype=float)
    response = np.asarray(response, dtype=float)
    rows, cols = design.shape
    if rows < cols + 1:
        raise SeriesTooShort(f"{rows} observations cannot fit {cols} coefficients")

    q, r = np.linalg.qr(design, mode="reduced")
    diag = np.abs(np.diag(r))
    if diag.min() < RANK_RTOL * diag.max():
        raise RankDeficient(
            f"design matrix is rank deficient (|R| diagonal ratio {diag.min() / diag.max():.3g})"
        )

    coefficients = solve_triangular(r, q.T @ response)
    residuals = response - design @ coefficients
    variance = float(residuals @ residuals) / (rows - cols)
    r_inv = solve_triangular(r, np.eye(cols))
    standard_errors = np.sqrt(variance * np.sum(r_inv ** 2, axis=1))
    return coefficients, standard_errors, variance


def adf_design(values: np.ndarray, n_lags: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Regression rows for dy(i) = a + b*i + g*y(i-1) + sum_m d_m dy(i-m).

    Column order: lagged level, lagged differences, constant, trend.
    """
    diff = np.diff(values)
    n_obs = diff.size - n_lags
    response = diff[n_lags:]
    columns = [values[n_lags:-1]]
    columns += [diff[n_lags - m:diff.size - m] for m in range(1, n_lags + 1)]
    columns += [np.ones(n_obs), np.arange(1, n_obs + 1, dtype=float)]
    return np.column_stack(columns), response


def adf_pvalue(series: ArrayOrSeries, n_lags: int = 1) -> AdfResult:
    """Constant-plus-trend ADF test of a unit root in ``series``"""
    values = as_values(series)
    if n_lags < 0:
        raise ValueError("n_lags must be non-negative")
    if values.size < n_lags + MIN_ADF_SAMPLES:
        raise SeriesTooShort(
            f"ADF with {n_lags} lag(s) needs at least {n_lags + MIN_ADF_SAMPLES} samples, got {values.size}"
        )

    design, response = adf_design(values, n_lags)
    coefficients, standard_errors, _ = ols_fit(design, response)
    t_stat = float(coefficients[0] / standard_errors[0])

    p_value = float(mackinnonp(t_stat, regression=AdfVariant.CONSTANT_TREND.value, N=1))
    if p_value <= 0.0 or p_value >= 1.0:
        # outside the response surface's tabulated range
        logger.warning(f"ADF statistic {t_stat:.3f} outside the tabulated range; p-value clamped")
        p_value = float(np.clip(p_value, P_VALUE_FLOOR, P_VALUE_CEIL))

    return AdfResult(
        gamma_hat=float(coefficients[0]),
        t_stat=t_stat,
        p_value=p_value,
        n_lags=n_lags,
        n_obs=int(response.size),
    )


def stc_select(decomp: ItdDecomposition, p_star: float = 0.05, n_lags: int = 1) -> CriterionTrace:
    """
    First level j >= 1 whose next rotation R^{j+1} has an ADF p-value above
    ``p_star``; the deepest level D when no rotation qualifies.

    The trace holds the p-values of every level 1..D-1, past the chosen one
    too.
    """
    depth = decomp.depth
    if depth == 0:
        raise EmptyDecomposition("STC needs at least one ITD level")

    scores: List[Tuple[int, float]] = []
    chosen: Optional[int] = None
    for j in range(1, depth):
        rotation = decomp.rotation(j + 1)
        try:
            p_value = adf_pvalue(rotation, n_lags).p_value
        except RankDeficient:
            logger.warning(f"rotation R^{j + 1} is rank deficient for ADF; treating it as non-stationary")
            p_value = 1.0
        scores.append((j, p_value))
        logger.debug(f"STC level {j}: p(R^{j + 1}) = {p_value:.4g}")
        if chosen is None and p_value > p_star:
            chosen = j

    fallback = chosen is None
    if fallback:
        chosen = depth
        logger.info(f"no rotation exceeded p*={p_star}; falling back to D={depth}")
    return CriterionTrace(Criterion.STC, tuple(scores), chosen, fallback)


# -- prominence / MaxEP ---------------------------------------------------

def prominences(series: ArrayOrSeries) -> Tuple[np.ndarray, np.ndarray]:
    """(positions, prominences) of every interior extremum, endpoints acting as neighbours"""
    values = as_values(series)
    return extremum_prominences(values, find_extrema(values))


def prominence(series: ArrayOrSeries, extremum_position: int) -> float:
    """min distance from an extremum to its two neighbouring extrema"""
    positions, heights = prominences(series)
    hit = np.flatnonzero(positions == extremum_position)
    if hit.size == 0:
        raise NotAnExtremum(f"position {extremum_position} is not an interior extremum")
    return float(heights[hit[0]])


def maxep(series: ArrayOrSeries) -> float:
    """Largest prominence over all interior extrema; 0 when there are none"""
    _, heights = prominences(series)
    return float(heights.max()) if heights.size else 0.0


def extrema_variation(series: ArrayOrSeries) -> float:
    """sum of |Y(tau_k) - Y(tau_{k-1})| over consecutive extrema and endpoints"""
    values = as_values(series)
    extrema = find_extrema(values)
    return float(np.sum(np.abs(np.diff(values[extrema.positions]))))


def total_variation(series: ArrayOrSeries) -> float:
    return float(np.sum(np.abs(np.diff(as_values(series)))))


def maxep_select(decomp: ItdDecomposition) -> CriterionTrace:
    """The level right before the steepest drop of maxep(B^j)"""
    depth = decomp.depth
    if depth == 0:
        raise EmptyDecomposition("MaxEP needs at least one ITD level")

    scores = np.array([maxep(decomp.baseline(j)) for j in range(depth + 1)])
    drops = np.diff(scores)
    # argmin returns the first index, so ties go to the smallest j
    chosen = int(np.argmin(drops))
    logger.debug(f"MaxEP values {scores.tolist()} -> j*={chosen}")
    return CriterionTrace(
        Criterion.MAXEP,
        tuple((j, float(m)) for j, m in enumerate(scores)),
        chosen,
    )


# -- split ------------------------------------------------------------------

def split_at(decomp: ItdDecomposition, trace: CriterionTrace) -> TendencySplit:
    """T = B^{j*}, r = Y - T"""
    tendency = decomp.baseline(trace.chosen)
    residual = TimeSeries(decomp.input.values - tendency.values, decomp.input.label)
    return TendencySplit(trace.chosen, tendency.with_label(decomp.input.label), residual, trace)


def tendency(
    series: TimeSeries,
    criterion: Criterion = Criterion.STC,
    boundary: BoundaryPolicy = BoundaryPolicy.FREE,
    params: Optional[TendencyParams] = None,
    decomp: Optional[ItdDecomposition] = None,
) -> TendencySplit:
    """Decompose ``series`` and split it at the level chosen by ``criterion``"""
    params = params or TendencyParams()
    criterion = Criterion(criterion)
    if decomp is None:
        decomp = decompose(series, boundary)

    if decomp.depth == 0:
        trace = CriterionTrace(criterion, (), 0)
    elif criterion is Criterion.STC:
        trace = stc_select(decomp, params.p_star, params.n_lags)
    else:
        trace = maxep_select(decomp)

    logger.debug(f"{criterion.value} selected j*={trace.chosen} of D={decomp.depth}")
    return split_at(decomp, trace)
