"""
Hodrick-Prescott trend.

The trend H minimises sum (Y - H)^2 + lambda * sum (second difference of H)^2,
i.e. solves (I + lambda D'D) H = Y where D is the (N-2) x N second-order
difference matrix. The system is symmetric positive definite with two
sub-diagonals and is solved in banded form.
"""

import math
from dataclasses import dataclass
from typing import Iterable, List, Union

import numpy as np
from pydantic import BaseModel, Field
from scipy import sparse
from scipy.linalg import solveh_banded

from ..core.errors import InvalidLambda
from ..core.series import TimeSeries
from ..utils.logging import get_logger

logger = get_logger("hp_filter")

DEFAULT_LAMBDA = 1600.0


class HpParams(BaseModel):
    """Smoothing parameter of the HP filter"""
    lam: float = Field(DEFAULT_LAMBDA, ge=0.0, allow_inf_nan=False, description="smoothing parameter lambda")


@dataclass(frozen=True, eq=False)
class HpResult:
    trend: TimeSeries
    residual: TimeSeries
    lam: float


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not math.isfinite(lam) or lam < 0.0:
        raise InvalidLambda(f"lambda must be finite and non-negative, got {lam}")
    return lam


def second_difference(n: int) -> sparse.csr_matrix:
    """(n-2) x n matrix of second-order differences"""
    return sparse.diags([1.0, -2.0, 1.0], [0, 1, 2], shape=(n - 2, n), format="csr")


def penalty_matrix(n: int, lam: float) -> sparse.csr_matrix:
    """I + lambda D'D"""
    d = second_difference(n)
    return (sparse.identity(n, format="csr") + lam * (d.T @ d)).tocsr()


def _lower_bands(system: sparse.spmatrix) -> np.ndarray:
    """Lower-form bands for solveh_banded: row k holds the k-th sub-diagonal"""
    n = system.shape[0]
    bands = np.zeros((3, n))
    for k in range(3):
        diagonal = system.diagonal(-k)
        bands[k, :diagonal.size] = diagonal
    return bands


def hp_trend(series: TimeSeries, lam: Union[float, HpParams] = DEFAULT_LAMBDA) -> HpResult:
    """HP trend and residual of ``series`` for smoothing parameter ``lam``"""
    if isinstance(lam, HpParams):
        lam = lam.lam
    lam = _check_lambda(lam)
    y = series.values
    n = y.size

    if lam == 0.0 or n < 3:
        trend = y.copy()
    else:
        system = penalty_matrix(n, lam)
        trend = solveh_banded(_lower_bands(system), y, lower=True, check_finite=False)

    logger.debug(f"HP trend of {n} samples at lambda={lam:g}")
    return HpResult(
        trend=TimeSeries(trend, series.label),
        residual=TimeSeries(y - trend, series.label),
        lam=lam,
    )


def hp_sweep(series: TimeSeries, lambdas: Iterable[float]) -> List[HpResult]:
    return [hp_trend(series, lam) for lam in lambdas]


def hp_objective(series: TimeSeries, trend: np.ndarray, lam: float) -> float:
    y = series.values
    trend = np.asarray(trend, dtype=float)
    fit = float(np.sum((y - trend) ** 2))
    if y.size < 3:
        return fit
    return fit + lam * float(np.sum(np.diff(trend, n=2) ** 2))


def hp_normal_residual(series: TimeSeries, result: HpResult) -> float:
    """max |(I + lambda D'D) H - Y|"""
    y = series.values
    if y.size < 3:
        return float(np.max(np.abs(result.trend.values - y)))
    system = penalty_matrix(y.size, result.lam)
    return float(np.max(np.abs(system @ result.trend.values - y)))


def hp_gain(omega: float, lam: float) -> float:
    """
    Frequency response 4L(1-cos w)^2 / (1 + 4L(1-cos w)^2).

    It vanishes at w = 0, so it describes what the residual Y - H keeps;
    the trend passes 1 - hp_gain.
    """
    lam = _check_lambda(lam)
    x = 4.0 * lam * (1.0 - math.cos(omega)) ** 2
    return x / (1.0 + x)


def hp_trend_gain(omega: float, lam: float) -> float:
    return 1.0 - hp_gain(omega, lam)
