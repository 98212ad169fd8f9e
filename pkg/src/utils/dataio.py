"""
CSV ingestion and run outputs.

Every output directory is staged in a temporary sibling and renamed into
place once complete, together with a ``manifest.json`` holding the resolved
run configuration and a SHA-256 checksum per file. Floats are written in
their shortest round-trip form so that reading a file back reproduces the
in-memory values bit for bit.
"""

import csv
import hashlib
import json
import os
import shutil
import tempfile
import threading
from dataclasses import dataclass
from io import StringIO
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator

from .logging import get_logger
from ..core.errors import DataError, NonFiniteValue, ParseError, RankDeficient, SeriesTooShort
from ..analysis.criteria import adf_pvalue, maxep
from ..core.series import ItdDecomposition, TimeSeries

logger = get_logger("dataio")

MANIFEST_NAME = "manifest.json"

PathLike = Union[str, Path]


class CsvSpec(BaseModel):
    """Where a series lives inside a CSV file"""
    path: str
    value_column: Optional[Union[int, str]] = Field(
        None, description="header name or 0-based index; None selects the last column"
    )
    header: bool = True
    delimiter: str = ","

    @field_validator("delimiter")
    @classmethod
    def _single_character(cls, v: str) -> str:
        if len(v) != 1:
            raise ValueError("delimiter must be a single character")
        return v


class FileEntry(BaseModel):
    name: str
    sha256: str


class Manifest(BaseModel):
    config: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    files: List[FileEntry] = Field(default_factory=list)


@dataclass(frozen=True, eq=False)
class LoadedSeries:
    """A series plus the opaque row labels (e.g. dates) found next to it"""
    series: TimeSeries
    labels: Optional[List[str]] = None


# -- reading --------------------------------------------------------------

def _resolve_column(spec: CsvSpec, header: Optional[List[str]], width: int) -> int:
    column = spec.value_column
    if column is None:
        return width - 1
    if isinstance(column, int):
        index = int(column)
        if not 0 <= index < width:
            raise DataError(f"{spec.path}: column index {index} outside 0..{width - 1}")
        return index
    if header is None:
        raise DataError(f"{spec.path}: column '{column}' given by name but the file has no header")
    try:
        return header.index(column)
    except ValueError:
        raise DataError(f"{spec.path}: no column named '{column}' (have {', '.join(header)})") from None


def read_table(spec: CsvSpec) -> LoadedSeries:
    """Read the selected column, keeping the first other column as labels"""
    path = Path(spec.path)
    if not path.exists():
        raise FileNotFoundError(f"File {spec.path} not found")

    values: List[float] = []
    labels: List[str] = []
    header: Optional[List[str]] = None
    column: Optional[int] = None
    label_column: Optional[int] = None

    with open(path, 'r', newline='') as f:
        reader = csv.reader(f, delimiter=spec.delimiter)
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            cells = [cell.strip() for cell in row]
            if column is None:
                if spec.header:
                    header = cells
                column = _resolve_column(spec, header, len(cells))
                if header is not None:
                    label_column = next(
                        (k for k, name in enumerate(header) if k != column and name != "i"), None
                    )
                    continue
            if column >= len(cells):
                raise ParseError(f"missing value column {column}", reader.line_num)
            try:
                value = float(cells[column])
            except ValueError:
                raise ParseError(f"cannot parse '{cells[column]}' as a number", reader.line_num) from None
            if not np.isfinite(value):
                raise NonFiniteValue(f"non-finite value '{cells[column]}'", reader.line_num)
            values.append(value)
            if label_column is not None and label_column < len(cells):
                labels.append(cells[label_column])

    if not values:
        raise DataError(f"{spec.path}: no data rows")

    label = header[column] if header is not None else None
    logger.debug(f"read {len(values)} values from {path}")
    return LoadedSeries(TimeSeries(values, label), labels or None)


def read_series(spec: CsvSpec) -> TimeSeries:
    return read_table(spec).series


def read_header(path: PathLike, delimiter: str = ",") -> List[str]:
    """Column names of a CSV file; empty for an empty file"""
    with open(path, 'r', newline='') as f:
        for row in csv.reader(f, delimiter=delimiter):
            if row and any(cell.strip() for cell in row):
                return [cell.strip() for cell in row]
    return []


def read_column(path: PathLike, name: str) -> TimeSeries:
    """One named column of a file produced by the writers below"""
    return read_series(CsvSpec(path=str(path), value_column=name))


# -- writing --------------------------------------------------------------

def format_value(value: Any) -> str:
    """Shortest round-trip text for floats, plain text otherwise; None/NaN -> empty"""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "" if np.isnan(value) else repr(float(value))
    return str(value)


def render_table(header: Sequence[str], columns: Sequence[Sequence[Any]]) -> str:
    lengths = {len(c) for c in columns}
    if len(lengths) > 1:
        raise DataError(f"columns have different lengths: {sorted(lengths)}")
    buffer = StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in zip(*columns):
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Write through a temporary file in the same directory, then rename"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, 'w', newline='') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_table(path: PathLike, header: Sequence[str], columns: Sequence[Sequence[Any]]) -> Path:
    return atomic_write_text(path, render_table(header, columns))


def write_series(path: PathLike, series: TimeSeries, labels: Optional[List[str]] = None) -> Path:
    """Single-series CSV with columns (i, value) or (i, label, value)"""
    index = np.arange(series.n)
    if labels is not None:
        text = render_table(["i", "label", "value"], [index, labels, series.values])
    else:
        text = render_table(["i", "value"], [index, series.values])
    return atomic_write_text(path, text)


def sha256_of(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


class OutputDir:
    """
    Staging area for one run's output directory.

    Files go to a temporary sibling of ``target``; on a clean exit the
    manifest is written and the staging directory replaces ``target``.
    On error nothing is left behind.
    """

    def __init__(self, target: PathLike, config: Optional[Dict[str, Any]] = None, seed: Optional[int] = None):
        self.target = Path(target)
        self.config = config or {}
        self.seed = seed
        self.staging: Optional[Path] = None
        self.manifest: Optional[Manifest] = None
        self._files: List[str] = []
        self._lock = threading.Lock()

    def __enter__(self) -> "OutputDir":
        parent = self.target.resolve().parent
        parent.mkdir(parents=True, exist_ok=True)
        self.staging = Path(tempfile.mkdtemp(prefix=f".{self.target.name}.", dir=parent))
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        if exc_type is not None:
            shutil.rmtree(self.staging, ignore_errors=True)
            return False
        try:
            self.manifest = self._write_manifest()
            if self.target.exists():
                shutil.rmtree(self.target)
            os.replace(self.staging, self.target)
        except BaseException:
            shutil.rmtree(self.staging, ignore_errors=True)
            raise
        logger.info(f"wrote {len(self._files)} file(s) to {self.target}")
        return False

    def path(self, name: str) -> Path:
        """Reserve ``name`` for a writer that produces its own file"""
        with self._lock:
            if name not in self._files:
                self._files.append(name)
        return self.staging / name

    def write_text(self, name: str, text: str) -> Path:
        path = self.path(name)
        with open(path, 'w', newline='') as f:
            f.write(text)
        return path

    def write_table(self, name: str, header: Sequence[str], columns: Sequence[Sequence[Any]]) -> Path:
        return self.write_text(name, render_table(header, columns))

    def _write_manifest(self) -> Manifest:
        manifest = Manifest(
            config=self.config,
            seed=self.seed,
            files=[FileEntry(name=name, sha256=sha256_of(self.staging / name)) for name in sorted(self._files)],
        )
        text = json.dumps(manifest.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
        (self.staging / MANIFEST_NAME).write_text(text)
        return manifest


def load_manifest(directory: PathLike) -> Manifest:
    with open(Path(directory) / MANIFEST_NAME, 'r') as f:
        return Manifest.model_validate(json.load(f))


def verify_manifest(directory: PathLike) -> List[str]:
    """Names of files whose checksum no longer matches (missing files included)"""
    directory = Path(directory)
    mismatched = []
    for entry in load_manifest(directory).files:
        path = directory / entry.name
        if not path.exists() or sha256_of(path) != entry.sha256:
            mismatched.append(entry.name)
    return mismatched


def level_file_name(level: int) -> str:
    return f"level_{level:02d}.csv"


def write_decomposition(
    decomp: ItdDecomposition,
    directory: PathLike,
    config: Optional[Dict[str, Any]] = None,
    seed: Optional[int] = None,
    n_lags: int = 1,
) -> Manifest:
    """
    One CSV per level (i, baseline, rotation), ``summary.csv`` for levels
    0..D and the manifest. ``adf_p`` is the ADF p-value of the rotation
    removed at that level, blank for level 0 or when the test cannot run.
    """
    index = np.arange(decomp.input.n)
    counts = decomp.extrema_counts()
    summary_levels, summary_extrema, summary_maxep, summary_p = [], [], [], []

    with OutputDir(directory, config, seed) as out:
        for level in decomp.levels:
            out.write_table(
                level_file_name(level.level),
                ["i", "baseline", "rotation"],
                [index, level.baseline.values, level.rotation.values],
            )

        for j in range(decomp.depth + 1):
            summary_levels.append(j)
            summary_extrema.append(counts[j])
            summary_maxep.append(maxep(decomp.baseline(j)))
            p_value = None
            if j > 0:
                try:
                    p_value = adf_pvalue(decomp.rotation(j), n_lags).p_value
                except (SeriesTooShort, RankDeficient) as e:
                    logger.debug(f"no ADF p-value for R^{j}: {e}")
            summary_p.append(p_value)

        out.write_table(
            "summary.csv",
            ["level", "n_extrema", "maxep", "adf_p"],
            [summary_levels, summary_extrema, summary_maxep, summary_p],
        )

    return out.manifest
