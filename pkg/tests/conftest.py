"""Shared fixtures"""

import os
from collections import Counter
from pathlib import Path
from typing import Callable, Iterable

import numpy as np
import pytest

from src.core.itd import decompose, find_extrema
from src.core.series import ItdDecomposition, TimeSeries
from src.signals.generators import gen_chirp, gen_multiscale, gen_noisy_sine, gen_sde

GOLDEN_DIR = Path(__file__).parent / "golden"


def random_series(seed: int, n: int) -> TimeSeries:
    """Uniform noise on a random walk, so both fine and coarse structure exist"""
    rng = np.random.default_rng(seed)
    return TimeSeries(np.cumsum(rng.standard_normal(n)) + rng.random(n), f"random-{seed}")


def rotation_is_monotone(decomp: ItdDecomposition, j: int, rtol: float = 1e-12) -> bool:
    """R^j is monotone on every closed interval between adjacent extrema of B^{j-1}"""
    tol = rtol * max(decomp.input.scale, 1.0)
    rotation = decomp.rotation(j).values
    positions = find_extrema(decomp.baseline(j - 1)).positions
    for a, b in zip(positions[:-1], positions[1:]):
        steps = np.diff(rotation[a:b + 1])
        if not (np.all(steps >= -tol) or np.all(steps <= tol)):
            return False
    return True


def modal(choices: Iterable[int]) -> int:
    counts = Counter(choices)
    # ties go to the smaller level
    return min(counts, key=lambda j: (-counts[j], j))


@pytest.fixture(scope="session")
def chirp() -> TimeSeries:
    return gen_chirp()


@pytest.fixture(scope="session")
def generated_signals() -> dict:
    return {
        "sde": gen_sde(0),
        "noisy-sine": gen_noisy_sine(0),
        "multiscale": gen_multiscale(0),
        "chirp": gen_chirp(),
    }


@pytest.fixture(scope="session")
def chirp_decomposition(chirp) -> ItdDecomposition:
    return decompose(chirp)


@pytest.fixture
def write_csv(tmp_path) -> Callable[..., Path]:
    """Write literal CSV text to a file under tmp_path"""
    def _write(text: str, name: str = "input.csv") -> Path:
        path = tmp_path / name
        path.write_text(text)
        return path
    return _write


def _is_number(field: str) -> bool:
    try:
        float(field)
    except ValueError:
        return False
    return True


@pytest.fixture
def golden() -> Callable[[str, str], None]:
    """
    Compare CSV text against tests/golden/<name>.

    Numeric fields match to a relative 1e-5, everything else exactly. A
    missing file fails the test; TENDEX_UPDATE_GOLDEN=1 records every file
    that is checked instead of comparing.
    """
    def _check(name: str, text: str) -> None:
        path = GOLDEN_DIR / name
        if os.getenv("TENDEX_UPDATE_GOLDEN") == "1":
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
            return
        if not path.exists():
            pytest.fail(f"golden file {name} is missing; rerun with TENDEX_UPDATE_GOLDEN=1 to record it")

        expected = path.read_text().splitlines()
        actual = text.splitlines()
        assert len(actual) == len(expected), f"{name}: {len(actual)} lines, golden has {len(expected)}"
        for number, (got, want) in enumerate(zip(actual, expected), start=1):
            got_fields, want_fields = got.split(","), want.split(",")
            assert len(got_fields) == len(want_fields), f"{name}:{number}: {got!r} != {want!r}"
            for a, b in zip(got_fields, want_fields):
                if _is_number(a) and _is_number(b):
                    assert float(a) == pytest.approx(float(b), rel=1e-5), f"{name}:{number}: {got!r} != {want!r}"
                else:
                    assert a == b, f"{name}:{number}: {got!r} != {want!r}"
    return _check
