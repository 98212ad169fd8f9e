"""Discrete Fourier moduli of a series and of tendency residuals"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..core.errors import LengthMismatch
from ..core.series import TimeSeries

DEFAULT_MAX_BIN = 250


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    frequencies: np.ndarray
    modulus: np.ndarray
    label: str = ""

    def truncate(self, max_bin: int) -> "SpectrumReport":
        """Keep bins < max_bin"""
        keep = self.frequencies < max_bin
        return SpectrumReport(self.frequencies[keep], self.modulus[keep], self.label)

    def __len__(self) -> int:
        return int(self.modulus.size)


def dft(series: TimeSeries) -> np.ndarray:
    """X_k = sum_i Y(i) exp(-2 pi i i k / N), unwindowed"""
    return np.fft.fft(series.values)


def dft_modulus(series: TimeSeries, label: Optional[str] = None) -> SpectrumReport:
    modulus = np.abs(dft(series))
    return SpectrumReport(
        frequencies=np.arange(modulus.size),
        modulus=modulus,
        label=label if label is not None else (series.label or ""),
    )


def residual_spectrum_report(
    original: TimeSeries,
    itd_residual: TimeSeries,
    hp_residual: TimeSeries,
    max_bin: int = DEFAULT_MAX_BIN,
) -> Tuple[SpectrumReport, SpectrumReport, SpectrumReport]:
    """Spectra of the series and both residuals, truncated to bins < max_bin"""
    if not original.n == itd_residual.n == hp_residual.n:
        raise LengthMismatch(
            f"series lengths differ: {original.n}, {itd_residual.n}, {hp_residual.n}"
        )
    return (
        dft_modulus(original, "original").truncate(max_bin),
        dft_modulus(itd_residual, "itd_residual").truncate(max_bin),
        dft_modulus(hp_residual, "hp_residual").truncate(max_bin),
    )


def low_frequency_ratio(numerator: SpectrumReport, denominator: SpectrumReport, bins: range) -> np.ndarray:
    """numerator / denominator modulus on ``bins``; inf where the denominator vanishes"""
    idx = np.asarray(list(bins))
    num = numerator.modulus[idx]
    den = denominator.modulus[idx]
    with np.errstate(divide="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)
