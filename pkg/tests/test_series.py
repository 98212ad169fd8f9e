import numpy as np
import pytest

from src.core.errors import DataError, NonFiniteValue
from src.core.series import BoundaryPolicy, ExtremaSet, ExtremumKind, KnotSet, TimeSeries


class TestTimeSeries:
    def test_values_are_read_only_copies(self):
        source = np.array([1.0, 2.0, 3.0])
        series = TimeSeries(source, "y")
        source[0] = 99.0
        assert series[0] == 1.0
        with pytest.raises(ValueError):
            series.values[0] = 5.0

    def test_rejects_empty(self):
        with pytest.raises(DataError):
            TimeSeries.of([])

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(NonFiniteValue):
            TimeSeries.of([0.0, bad, 1.0])

    def test_scale_and_length(self):
        series = TimeSeries.of([1.0, -4.0, 2.0])
        assert series.n == len(series) == 3
        assert series.scale == 4.0

    def test_arithmetic_keeps_label(self):
        a = TimeSeries.of([1.0, 2.0], "a")
        b = TimeSeries.of([0.5, 0.5], "b")
        assert np.array_equal((a - b).values, [0.5, 1.5])
        assert (a + b).label == "a"
        assert a.with_label("c").label == "c"


def test_extrema_set_views():
    extrema = ExtremaSet([0, 2, 5, 7], [0, 1, -1, 0])
    assert extrema.n_interior == 2
    assert extrema.interior.tolist() == [2, 5]
    assert extrema.entries == [
        (0, ExtremumKind.ENDPOINT),
        (2, ExtremumKind.MAX),
        (5, ExtremumKind.MIN),
        (7, ExtremumKind.ENDPOINT),
    ]
    assert len(extrema) == 4


class TestKnotSet:
    def test_needs_two_knots(self):
        with pytest.raises(DataError):
            KnotSet([0], [1.0])

    def test_positions_must_increase(self):
        with pytest.raises(AssertionError):
            KnotSet([0, 3, 3], [0.0, 1.0, 2.0])

    def test_boundary_accepts_plain_string(self):
        assert KnotSet([0, 4], [0.0, 1.0], "periodic").boundary is BoundaryPolicy.PERIODIC
