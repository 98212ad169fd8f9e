"""
Intrinsic Time Decomposition.

A series B^0 = Y is split into baselines B^1..B^D and rotations R^1..R^D
with B^{j-1} = B^j + R^j. Each step anchors knots at the extrema of the
current baseline (plateaus collapse to their rightmost sample), updates
the knot values, and maps every segment between adjacent knots affinely
onto the new knot values. The iteration stops once the baseline has no
interior extrema left. A periodic baseline can keep one extremum of
vanishing prominence forever, so periodic runs also stop once every
remaining extremum has a negligible prominence.

Positions are 0-based; the textbook formulas index from 1.
"""

from typing import Optional, Tuple, Union

import numpy as np
from scipy.signal import find_peaks

from .errors import NoInteriorExtrema, NumericalError
from .series import (
    BoundaryPolicy,
    ExtremaSet,
    ItdDecomposition,
    ItdLevel,
    KnotSet,
    TimeSeries,
)
from ..utils.logging import get_logger

logger = get_logger("itd")

# relative to max|Y|
DEGENERATE_SEGMENT_RTOL = 1e-12
NEGLIGIBLE_PROMINENCE_RTOL = 1e-12
# levels allowed past the sample count before giving up
EXTRA_LEVEL_LIMIT = 100

ArrayOrSeries = Union[TimeSeries, np.ndarray]


def as_values(series: ArrayOrSeries) -> np.ndarray:
    return series.values if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)


def find_extrema(series: ArrayOrSeries) -> ExtremaSet:
    """
    Interior strict extrema of a series, endpoints included as entries.

    A plateau counts as an extremum only when both neighbouring runs are
    strictly on the same side of it; its position is the rightmost sample.
    """
    values = as_values(series)
    n = values.size
    _, max_props = find_peaks(values, plateau_size=1)
    _, min_props = find_peaks(-values, plateau_size=1)

    maxima = max_props["right_edges"]
    minima = min_props["right_edges"]
    interior = np.concatenate([maxima, minima])
    codes = np.concatenate([np.ones(maxima.size, np.int8), -np.ones(minima.size, np.int8)])
    order = np.argsort(interior, kind="stable")

    ends = [0] if n == 1 else [0, n - 1]
    positions = np.concatenate([[0], interior[order], ends[1:]]).astype(np.intp)
    codes = np.concatenate([[0], codes[order], np.zeros(len(ends) - 1, np.int8)])
    return ExtremaSet(positions, codes, includes_endpoints=True)


def extremum_prominences(values: np.ndarray, extrema: ExtremaSet) -> Tuple[np.ndarray, np.ndarray]:
    """(positions, prominences) of the interior extrema, endpoints acting as neighbours"""
    at = values[extrema.positions]
    interior = np.flatnonzero(extrema.codes)
    left = np.abs(at[interior] - at[interior - 1])
    right = np.abs(at[interior] - at[interior + 1])
    return extrema.positions[interior], np.minimum(left, right)


def knot_update(knots: KnotSet) -> KnotSet:
    """
    New knot values at unchanged positions.

    Interior knots move halfway towards the chord through their two
    neighbours. Free endpoints average with the adjacent knot; periodic
    endpoints both take the mean of the first and last knot.
    """
    old = knots.values
    tau = knots.tau.astype(float)
    new = np.empty_like(old)

    if old.size > 2:
        span = tau[2:] - tau[:-2]
        assert np.all(span > 0)
        weight = (tau[1:-1] - tau[:-2]) / span
        new[1:-1] = 0.5 * (old[:-2] + weight * (old[2:] - old[:-2])) + 0.5 * old[1:-1]

    if knots.boundary is BoundaryPolicy.PERIODIC:
        new[0] = new[-1] = 0.5 * (old[0] + old[-1])
    else:
        new[0] = 0.5 * (old[1] + old[0])
        new[-1] = 0.5 * (old[-2] + old[-1])

    return KnotSet(knots.tau, new, knots.boundary)


def _step(
    values: np.ndarray,
    extrema: ExtremaSet,
    boundary: BoundaryPolicy,
    eps: float,
) -> Tuple[np.ndarray, KnotSet, int]:
    """One application of the baseline operator; returns (B^{j+1}, knots, degenerate count)"""
    tau = extrema.positions
    old_knots = KnotSet(tau, values[tau], boundary)
    new_knots = knot_update(old_knots)
    old, new = old_knots.values, new_knots.values

    n = values.size
    index = np.arange(1, n)
    # segment k covers (tau[k], tau[k+1]]
    seg = np.searchsorted(tau, index, side="left") - 1

    left_old, right_old = old[seg], old[seg + 1]
    left_new, right_new = new[seg], new[seg + 1]
    denominator = right_old - left_old
    degenerate = np.abs(denominator) < eps

    ratio = np.divide(
        right_new - left_new,
        denominator,
        out=np.zeros_like(denominator),
        where=~degenerate,
    )
    nxt = np.empty(n)
    nxt[1:] = left_new + ratio * (values[1:] - left_old)

    if degenerate.any():
        left_tau, right_tau = tau[seg], tau[seg + 1]
        fraction = (index - left_tau) / (right_tau - left_tau)
        fallback = left_new + (right_new - left_new) * fraction
        nxt[1:] = np.where(degenerate, fallback, nxt[1:])

    nxt[0] = new[0]
    # knot positions carry the knot values exactly
    nxt[tau] = new

    n_degenerate = int(np.unique(seg[degenerate]).size)
    return nxt, new_knots, n_degenerate


def baseline_step(
    baseline: ArrayOrSeries,
    boundary: BoundaryPolicy = BoundaryPolicy.FREE,
    scale: Optional[float] = None,
) -> Tuple[TimeSeries, TimeSeries]:
    """
    Apply the baseline operator once: returns (B^{j+1}, R^{j+1}).

    ``scale`` is the reference magnitude for the degenerate-segment
    threshold; it defaults to max|baseline|.
    """
    values = as_values(baseline)
    extrema = find_extrema(values)
    if extrema.n_interior == 0:
        raise NoInteriorExtrema("baseline has no interior extrema; the decomposition is complete")

    if scale is None:
        scale = float(np.max(np.abs(values)))
    nxt, _, n_degenerate = _step(values, extrema, BoundaryPolicy(boundary), DEGENERATE_SEGMENT_RTOL * scale)
    if n_degenerate:
        logger.warning(f"{n_degenerate} degenerate segment(s) interpolated by index")
    return TimeSeries(nxt), TimeSeries(values - nxt)


def decompose(
    series: TimeSeries,
    boundary: BoundaryPolicy = BoundaryPolicy.FREE,
    max_levels: Optional[int] = None,
) -> ItdDecomposition:
    """
    Iterate the baseline operator until no interior extrema remain.

    Periodic runs also stop when the largest remaining prominence is at
    most 1e-12 * max|Y|. ``max_levels`` defaults to n + 100; exceeding it
    raises NumericalError.
    """
    boundary = BoundaryPolicy(boundary)
    values = series.values
    eps = DEGENERATE_SEGMENT_RTOL * series.scale
    negligible = NEGLIGIBLE_PROMINENCE_RTOL * series.scale
    limit = max_levels if max_levels is not None else series.n + EXTRA_LEVEL_LIMIT

    extrema = find_extrema(values)
    input_extrema = extrema.n_interior
    levels = []
    while extrema.n_interior > 0:
        if boundary is BoundaryPolicy.PERIODIC:
            _, heights = extremum_prominences(values, extrema)
            if heights.max() <= negligible:
                logger.info(
                    f"stopping at D={len(levels)}: {extrema.n_interior} extrema left, "
                    f"largest prominence {heights.max():.3g}"
                )
                break
        if len(levels) >= limit:
            raise NumericalError(
                f"decomposition did not terminate within {limit} levels "
                f"({extrema.n_interior} extrema left)"
            )
        j = len(levels) + 1
        nxt, knots, n_degenerate = _step(values, extrema, boundary, eps)
        if n_degenerate:
            logger.warning(f"level {j}: {n_degenerate} degenerate segment(s) interpolated by index")

        next_extrema = find_extrema(nxt)
        logger.debug(f"level {j}: {extrema.n_interior} -> {next_extrema.n_interior} extrema")
        levels.append(ItdLevel(
            level=j,
            baseline=TimeSeries(nxt),
            rotation=TimeSeries(values - nxt),
            baseline_knots=knots,
            n_extrema=next_extrema.n_interior,
            degenerate_segments=n_degenerate,
        ))
        values, extrema = nxt, next_extrema

    logger.debug(f"decomposition of {series.n} samples finished at D={len(levels)}")
    return ItdDecomposition(
        input=series,
        levels=tuple(levels),
        boundary=boundary,
        input_extrema=input_extrema,
    )


def reconstruct(decomp: ItdDecomposition) -> TimeSeries:
    """B^D plus every rotation"""
    if decomp.depth == 0:
        return decomp.input
    total = decomp.levels[-1].baseline.values.copy()
    for level in reversed(decomp.levels):
        total += level.rotation.values
    return TimeSeries(total, decomp.input.label)
