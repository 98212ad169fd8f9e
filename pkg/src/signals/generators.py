"""
Seeded synthetic signals.

All random draws come from numpy's PCG64 bit generator wrapped in a
``numpy.random.Generator``; Gaussian variates use its ziggurat
``standard_normal``. A given (kind, seed, overrides) always produces the
same series.
"""

import math
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..core.errors import NumericalBlowup
from ..core.series import TimeSeries
from ..utils.logging import get_logger

logger = get_logger("signals")

BLOWUP_LIMIT = 1e6
SINE_SAMPLES = math.floor(200 * math.pi)
CHIRP_SAMPLES = 201


class SignalKind(str, Enum):
    SDE = "sde"
    NOISY_SINE = "noisy-sine"
    MULTISCALE = "multiscale"
    CHIRP = "chirp"


class GeneratorOverrides(BaseModel):
    """Optional per-kind parameters; None keeps the kind's default"""
    n: Optional[int] = Field(None, ge=1)
    dt: Optional[float] = Field(None, gt=0.0)
    y0: Optional[float] = None
    noise_variance: Optional[float] = Field(None, ge=0.0)
    layers: Optional[Tuple[int, ...]] = None

    model_config = {"extra": "forbid"}


OVERRIDES_BY_KIND = {
    SignalKind.SDE: frozenset({"n", "dt", "y0", "noise_variance"}),
    SignalKind.NOISY_SINE: frozenset({"noise_variance"}),
    SignalKind.MULTISCALE: frozenset({"n", "layers"}),
    SignalKind.CHIRP: frozenset(),
}


class GeneratorSpec(BaseModel):
    kind: SignalKind
    seed: int = Field(0, ge=0, lt=2 ** 64)
    overrides: GeneratorOverrides = Field(default_factory=GeneratorOverrides)

    @model_validator(mode="after")
    def _overrides_fit_kind(self) -> "GeneratorSpec":
        unused = [
            name for name, value in self.overrides
            if value is not None and name not in OVERRIDES_BY_KIND[self.kind]
        ]
        if unused:
            raise ValueError(f"{self.kind.value} does not take {', '.join(unused)}")
        return self


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _drift(y: float) -> float:
    return -(y ** 5 - 2.0 * y ** 4 + 3.0 * y ** 2)


def gen_sde(
    seed: int,
    n: int = 2000,
    dt: float = 0.05,
    y0: float = 0.5,
    noise_variance: float = 1.0,
) -> TimeSeries:
    """
    Euler-Maruyama path of dY = -(Y^5 - 2Y^4 + 3Y^2) dt + dW.

    Returns n + 1 samples, Y_0 included.
    """
    if n < 1 or dt <= 0:
        raise ValueError("gen_sde needs n >= 1 and dt > 0")

    shocks = make_rng(seed).standard_normal(n) * math.sqrt(noise_variance * dt)
    path = np.empty(n + 1)
    path[0] = y = y0
    for m in range(n):
        y = y + _drift(y) * dt + shocks[m]
        if not abs(y) <= BLOWUP_LIMIT:
            raise NumericalBlowup(f"SDE path left |Y| <= {BLOWUP_LIMIT:g} at step {m + 1}; try another seed or a smaller dt")
        path[m + 1] = y
    return TimeSeries(path, f"sde-{seed}")


def gen_noisy_sine(seed: int, noise_variance: float = 0.1) -> TimeSeries:
    """sin(0.01 i) plus Gaussian noise of the given variance, 628 samples"""
    t = 0.01 * np.arange(SINE_SAMPLES)
    noise = make_rng(seed).standard_normal(SINE_SAMPLES) * math.sqrt(noise_variance)
    return TimeSeries(np.sin(t) + noise, f"noisy-sine-{seed}")


def gen_multiscale(seed: int, n: int = 1000, layers: Sequence[int] = (1, 2, 3)) -> TimeSeries:
    """
    Three superposed uniform block layers.

    Layer k has amplitude 10^(k-1) and holds each draw for 10^k samples.
    Draws are taken layer by layer from one generator, so dropping a
    layer from the sum leaves the others unchanged.
    """
    if n < 1:
        raise ValueError("gen_multiscale needs n >= 1")
    rng = make_rng(seed)
    index = np.arange(n)
    values = np.zeros(n)
    for k in (1, 2, 3):
        block = 10 ** k
        draws = rng.random(-(-n // block))
        if k in layers:
            values += 10 ** (k - 1) * draws[index // block]
    return TimeSeries(values, f"multiscale-{seed}")


def gen_chirp() -> TimeSeries:
    """10 t^3 cos(13 t^3) sin(31 pi t) on t = 0, 0.01, ..., 2"""
    t = 0.01 * np.arange(CHIRP_SAMPLES)
    return TimeSeries(10.0 * t ** 3 * np.cos(13.0 * t ** 3) * np.sin(31.0 * np.pi * t), "chirp")


def generate(spec: GeneratorSpec) -> TimeSeries:
    """Build the series described by ``spec``"""
    o = spec.overrides
    if spec.kind is SignalKind.SDE:
        kwargs = {k: v for k, v in (("n", o.n), ("dt", o.dt), ("y0", o.y0), ("noise_variance", o.noise_variance)) if v is not None}
        series = gen_sde(spec.seed, **kwargs)
    elif spec.kind is SignalKind.NOISY_SINE:
        series = gen_noisy_sine(spec.seed, **({} if o.noise_variance is None else {"noise_variance": o.noise_variance}))
    elif spec.kind is SignalKind.MULTISCALE:
        kwargs = {k: v for k, v in (("n", o.n), ("layers", o.layers)) if v is not None}
        series = gen_multiscale(spec.seed, **kwargs)
    else:
        series = gen_chirp()

    logger.debug(f"generated {spec.kind.value} (seed {spec.seed}): {series.n} samples")
    return series
