"""Value types shared by the decomposition, the criteria and the writers"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DataError, NonFiniteValue


class BoundaryPolicy(str, Enum):
    """How the endpoint knots are updated at each ITD step"""
    FREE = "free"
    PERIODIC = "periodic"


class ExtremumKind(str, Enum):
    """Kind of an entry in an ExtremaSet"""
    MIN = "min"
    MAX = "max"
    ENDPOINT = "endpoint"


_KIND_CODES = {1: ExtremumKind.MAX, -1: ExtremumKind.MIN, 0: ExtremumKind.ENDPOINT}


def _frozen(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly indexed real-valued series, positions 0..N-1"""
    values: np.ndarray
    label: Optional[str] = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if values.size == 0:
            raise DataError("a time series needs at least one value")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise NonFiniteValue(f"non-finite value at position {bad}")
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def of(cls, values: Union[Sequence[float], np.ndarray], label: Optional[str] = None) -> "TimeSeries":
        return cls(np.asarray(values, dtype=float), label)

    def __len__(self) -> int:
        return int(self.values.size)

    def __getitem__(self, item):
        return self.values[item]

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def scale(self) -> float:
        """max |Y(i)|, the reference magnitude for tolerances"""
        return float(np.max(np.abs(self.values)))

    def with_label(self, label: Optional[str]) -> "TimeSeries":
        return TimeSeries(self.values, label)

    def __add__(self, other: "TimeSeries") -> "TimeSeries":
        return TimeSeries(self.values + _as_array(other), self.label)

    def __sub__(self, other: "TimeSeries") -> "TimeSeries":
        return TimeSeries(self.values - _as_array(other), self.label)


def _as_array(other: Union[TimeSeries, np.ndarray]) -> np.ndarray:
    return other.values if isinstance(other, TimeSeries) else np.asarray(other, dtype=float)


@dataclass(frozen=True, eq=False)
class ExtremaSet:
    """
    Ordered extrema of a series.

    ``positions`` are strictly increasing; ``codes`` hold +1 for a maximum,
    -1 for a minimum and 0 for an endpoint entry. Plateaus are represented
    by their rightmost sample.
    """
    positions: np.ndarray
    codes: np.ndarray
    includes_endpoints: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "positions", _frozen(np.asarray(self.positions, dtype=np.intp)))
        object.__setattr__(self, "codes", _frozen(np.asarray(self.codes, dtype=np.int8)))

    @property
    def interior(self) -> np.ndarray:
        """Positions of the interior extrema only"""
        return self.positions[self.codes != 0]

    @property
    def n_interior(self) -> int:
        return int(np.count_nonzero(self.codes))

    @property
    def entries(self) -> List[Tuple[int, ExtremumKind]]:
        return [(int(p), _KIND_CODES[int(c)]) for p, c in zip(self.positions, self.codes)]

    def __len__(self) -> int:
        return int(self.positions.size)


@dataclass(frozen=True, eq=False)
class KnotSet:
    """Knot positions and values; endpoints are always knots"""
    tau: np.ndarray
    values: np.ndarray
    boundary: BoundaryPolicy = BoundaryPolicy.FREE

    def __post_init__(self) -> None:
        tau = np.asarray(self.tau, dtype=np.intp)
        values = np.asarray(self.values, dtype=float)
        if tau.size < 2 or tau.size != values.size:
            raise DataError("a knot set needs at least two knots with one value each")
        assert np.all(np.diff(tau) > 0), "knot positions must be strictly increasing"
        object.__setattr__(self, "tau", _frozen(tau))
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "boundary", BoundaryPolicy(self.boundary))

    def __len__(self) -> int:
        return int(self.tau.size)


@dataclass(frozen=True, eq=False)
class ItdLevel:
    """One ITD step: B^{j-1} = baseline + rotation"""
    level: int
    baseline: TimeSeries
    rotation: TimeSeries
    baseline_knots: KnotSet
    n_extrema: int = 0
    degenerate_segments: int = 0


@dataclass(frozen=True, eq=False)
class ItdDecomposition:
    """Input series B^0 and the levels j = 1..D"""
    input: TimeSeries
    levels: Tuple[ItdLevel, ...] = field(default_factory=tuple)
    boundary: BoundaryPolicy = BoundaryPolicy.FREE
    input_extrema: int = 0

    @property
    def depth(self) -> int:
        """D, the number of levels"""
        return len(self.levels)

    def baseline(self, j: int) -> TimeSeries:
        if j == 0:
            return self.input
        return self.levels[j - 1].baseline

    def rotation(self, j: int) -> TimeSeries:
        if not 1 <= j <= self.depth:
            raise IndexError(f"rotation index {j} outside 1..{self.depth}")
        return self.levels[j - 1].rotation

    def extrema_counts(self) -> List[int]:
        """Interior extrema count of B^0..B^D"""
        counts = [self.input_extrema]
        counts.extend(level.n_extrema for level in self.levels)
        return counts

    def partial_sum(self, j: int) -> np.ndarray:
        """sum of R^1..R^j"""
        total = np.zeros(self.input.n)
        for level in self.levels[:j]:
            total += level.rotation.values
        return total
