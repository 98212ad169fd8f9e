#!/usr/bin/env python3
"""
tendex CLI - tendency extraction from the command line
Built with Typer; every command writes a self-describing output directory
"""
import asyncio
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import click
import numpy as np
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from src.analysis.criteria import Criterion, TendencyParams, TendencySplit, tendency as split_tendency
from src.analysis.hp_filter import HpParams, HpResult, hp_sweep, hp_trend
from src.analysis.spectra import dft_modulus, residual_spectrum_report
from src.core.config import RunConfig, load_run_config
from src.core.errors import LengthMismatch, TendexError
from src.core.itd import decompose as itd_decompose
from src.core.series import BoundaryPolicy, TimeSeries
from src.signals.generators import GeneratorOverrides, GeneratorSpec, SignalKind, generate as make_signal
from src.utils.dataio import (
    CsvSpec,
    LoadedSeries,
    OutputDir,
    read_column,
    read_header,
    read_table,
    write_decomposition,
    write_series,
)
from src.utils.logging import get_logger, set_level
from src.utils.plotting import write_plot_svg

__version__ = "1.0.0"

# Results go to stdout, diagnostics to stderr
console = Console()
err_console = Console(stderr=True)
logger = get_logger("cli")

app = typer.Typer(
    name="tendex",
    help="Tendency extraction with the Intrinsic Time Decomposition",
    rich_markup_mode="rich",
    add_completion=False,
    no_args_is_help=True,
)


class LogLevel(str, Enum):
    """Log levels"""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"


# -- shared option helpers -------------------------------------------------

InputOption = typer.Option(..., "--in", dir_okay=False, help="Input CSV file")
ColumnOption = typer.Option(None, "--column", help="Value column: header name or 0-based index (default: last column)")
NoHeaderOption = typer.Option(False, "--no-header", help="The input file has no header row")
DelimiterOption = typer.Option(",", "--delimiter", help="Field delimiter")
BoundaryOption = typer.Option(None, "--boundary", help="ITD endpoint treatment")
PStarOption = typer.Option(None, "--p-star", min=0.0, max=1.0, help="STC p-value threshold")
LagsOption = typer.Option(None, "--lags", min=0, help="Lagged differences in the ADF regression")
PlotOption = typer.Option(False, "--plot", help="Also write an SVG plot")


def _config(ctx: typer.Context, **overrides: Any) -> RunConfig:
    base: RunConfig = ctx.obj if isinstance(ctx.obj, RunConfig) else load_run_config()
    try:
        return base.merged(**overrides)
    except ValidationError as e:
        raise click.UsageError(str(e), ctx=ctx) from None


def _load(input_path: Path, column: Optional[str], no_header: bool, delimiter: str) -> LoadedSeries:
    value_column: Any = column
    if column is not None and column.isdigit():
        value_column = int(column)
    return read_table(CsvSpec(
        path=str(input_path),
        value_column=value_column,
        header=not no_header,
        delimiter=delimiter,
    ))


def _manifest_config(config: RunConfig, command: str, input_path: Optional[Path], **extra: Any) -> Dict[str, Any]:
    view = config.manifest_view()
    view["command"] = command
    if input_path is not None:
        view["input"] = str(input_path)
    view.update(extra)
    return view


def _frame(loaded: LoadedSeries, *extra: Tuple[str, Sequence[Any]]) -> Tuple[List[str], List[Sequence[Any]]]:
    """Column layout shared by the per-sample output files"""
    series = loaded.series
    header: List[str] = ["i"]
    columns: List[Sequence[Any]] = [np.arange(series.n)]
    if loaded.labels is not None and len(loaded.labels) == series.n:
        header.append("label")
        columns.append(loaded.labels)
    header.append("value")
    columns.append(series.values)
    for name, values in extra:
        header.append(name)
        columns.append(values)
    return header, columns


def _lambda_tag(lam: float) -> str:
    return f"{lam:g}"


def _split_table(title: str, rows: Sequence[Tuple[str, str, str, str]]) -> Table:
    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("Method", style="cyan")
    table.add_column("Parameter", style="dim")
    table.add_column("j*", justify="right", style="green")
    table.add_column("max |T + r - Y|", justify="right", style="yellow")
    for row in rows:
        table.add_row(*row)
    return table


def _split_error(series: TimeSeries, trend: TimeSeries, residual: TimeSeries) -> float:
    return float(np.max(np.abs(trend.values + residual.values - series.values)))


# -- root -----------------------------------------------------------------

@app.callback(invoke_without_command=True)
def main(
    ctx: typer.Context,
    config_file: Optional[Path] = typer.Option(None, "--config", dir_okay=False, help="JSON run configuration"),
    log_level: Optional[LogLevel] = typer.Option(None, "--log-level", help="Minimum log level to show"),
    version: bool = typer.Option(False, "--version", "-v", help="Show version information"),
):
    """
    tendex - Intrinsic Time Decomposition tendencies, HP trends and residual spectra
    """
    if version:
        console.print(Panel.fit(f"[bold blue]tendex[/bold blue]\nVersion: {__version__}", title="Version Info"))
        raise typer.Exit(0)

    config = load_run_config(config_file)
    if log_level is not None:
        config = config.merged(log_level=log_level.value)
    set_level(config.log_level)
    ctx.obj = config


# -- commands -------------------------------------------------------------

@app.command("generate")
def generate_cmd(
    ctx: typer.Context,
    kind: SignalKind = typer.Option(..., "--kind", help="Synthetic signal to generate"),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="PRNG seed (default: TENDEX_SEED or 0)"),
    n: Optional[int] = typer.Option(None, "--n", min=1, help="Number of steps / samples (sde, multiscale)"),
    dt: Optional[float] = typer.Option(None, "--dt", min=0.0, help="SDE time step"),
    y0: Optional[float] = typer.Option(None, "--y0", help="SDE initial value"),
    noise_variance: Optional[float] = typer.Option(None, "--noise-variance", min=0.0, help="Noise variance (sde, noisy-sine)"),
    out: Path = typer.Option(..., "--out", dir_okay=False, help="Output CSV file"),
):
    """Generate one of the synthetic test signals"""
    config = _config(ctx, seed=seed)
    try:
        spec = GeneratorSpec(
            kind=kind,
            seed=config.seed,
            overrides=GeneratorOverrides(n=n, dt=dt, y0=y0, noise_variance=noise_variance),
        )
    except ValidationError as e:
        raise click.UsageError(str(e), ctx=ctx) from None

    series = make_signal(spec)
    write_series(out, series)
    logger.info(f"generated {kind.value} with {series.n} samples -> {out}")
    console.print(f"[green]Wrote {series.n} samples of {kind.value} (seed {spec.seed}) to {out}[/green]")


@app.command("decompose")
def decompose_cmd(
    ctx: typer.Context,
    input_path: Path = InputOption,
    column: Optional[str] = ColumnOption,
    no_header: bool = NoHeaderOption,
    delimiter: str = DelimiterOption,
    boundary: Optional[BoundaryPolicy] = BoundaryOption,
    lags: Optional[int] = LagsOption,
    out: Path = typer.Option(..., "--out", file_okay=False, help="Output directory"),
):
    """Full ITD of a series: one file per level plus a summary"""
    config = _config(ctx, boundary=boundary, n_lags=lags, output_dir=str(out))
    loaded = _load(input_path, column, no_header, delimiter)

    decomp = itd_decompose(loaded.series, config.boundary)
    write_decomposition(
        decomp,
        out,
        config=_manifest_config(config, "decompose", input_path),
        seed=config.seed,
        n_lags=config.n_lags,
    )

    table = Table(title="ITD levels", show_header=True, header_style="bold magenta")
    table.add_column("Level", justify="right", style="cyan")
    table.add_column("Interior extrema", justify="right")
    for j, count in enumerate(decomp.extrema_counts()):
        table.add_row(str(j), str(count))
    console.print(table)
    console.print(f"[green]D = {decomp.depth}, written to {out}[/green]")


@app.command("tendency")
def tendency_cmd(
    ctx: typer.Context,
    input_path: Path = InputOption,
    column: Optional[str] = ColumnOption,
    no_header: bool = NoHeaderOption,
    delimiter: str = DelimiterOption,
    criterion: Optional[Criterion] = typer.Option(None, "--criterion", help="Level selection criterion"),
    p_star: Optional[float] = PStarOption,
    lags: Optional[int] = LagsOption,
    boundary: Optional[BoundaryPolicy] = BoundaryOption,
    out: Path = typer.Option(..., "--out", file_okay=False, help="Output directory"),
    plot: bool = PlotOption,
):
    """Split a series into tendency and residual"""
    config = _config(ctx, criterion=criterion, p_star=p_star, n_lags=lags, boundary=boundary, output_dir=str(out))
    loaded = _load(input_path, column, no_header, delimiter)
    series = loaded.series

    split = split_tendency(
        series,
        config.criterion,
        config.boundary,
        TendencyParams(p_star=config.p_star, n_lags=config.n_lags),
    )

    with OutputDir(out, _manifest_config(config, "tendency", input_path, j_star=split.j_star), config.seed) as target:
        header, columns = _frame(loaded, ("tendency", split.tendency.values), ("residual", split.residual.values))
        target.write_table("tendency.csv", header, columns)
        target.write_table(
            "trace.csv",
            ["level", "score"],
            [[j for j, _ in split.trace.per_level], [s for _, s in split.trace.per_level]],
        )
        if plot:
            write_plot_svg(
                [series.with_label("series"), split.tendency.with_label(f"tendency (j*={split.j_star})")],
                target.path("tendency.svg"),
                title=f"{config.criterion.value.upper()} tendency",
            )

    note = " (fallback: no rotation exceeded p*)" if split.trace.fallback_used else ""
    console.print(_split_table("Tendency", [(
        config.criterion.value,
        f"p*={config.p_star:g}" if config.criterion is Criterion.STC else "-",
        str(split.j_star),
        f"{_split_error(series, split.tendency, split.residual):.3g}",
    )]))
    console.print(f"[green]j* = {split.j_star}{note}, written to {out}[/green]")


@app.command("hp")
def hp_cmd(
    ctx: typer.Context,
    input_path: Path = InputOption,
    column: Optional[str] = ColumnOption,
    no_header: bool = NoHeaderOption,
    delimiter: str = DelimiterOption,
    lambdas: Optional[List[float]] = typer.Option(None, "--lambda", min=0.0, help="Smoothing parameter; repeat for a sweep"),
    out: Path = typer.Option(..., "--out", file_okay=False, help="Output directory"),
    plot: bool = PlotOption,
):
    """Hodrick-Prescott trend and residual"""
    config = _config(ctx, hp_lambda=lambdas[0] if lambdas else None, output_dir=str(out))
    lambdas = list(lambdas) if lambdas else [config.hp_lambda]
    loaded = _load(input_path, column, no_header, delimiter)
    series = loaded.series

    results = hp_sweep(series, lambdas)
    extra: List[Tuple[str, Sequence[Any]]] = []
    for k, result in enumerate(results):
        suffix = "" if k == 0 else f"_{_lambda_tag(result.lam)}"
        extra += [(f"trend{suffix}", result.trend.values), (f"residual{suffix}", result.residual.values)]

    with OutputDir(out, _manifest_config(config, "hp", input_path, lambdas=lambdas), config.seed) as target:
        target.write_table("hp.csv", *_frame(loaded, *extra))
        if plot:
            write_plot_svg(
                [series.with_label("series")]
                + [r.trend.with_label(f"HP lambda={_lambda_tag(r.lam)}") for r in results],
                target.path("hp.svg"),
                title="Hodrick-Prescott trend",
            )

    console.print(_split_table("HP filter", [
        ("hp", f"lambda={_lambda_tag(r.lam)}", "-", f"{_split_error(series, r.trend, r.residual):.3g}")
        for r in results
    ]))
    console.print(f"[green]written to {out}[/green]")


def _residual_from(directory: Path) -> TimeSeries:
    """Residual column of a tendency or hp output directory"""
    for name in ("tendency.csv", "hp.csv", "series.csv"):
        path = directory / name
        if path.exists():
            residual = next((h for h in read_header(path) if h.startswith("residual") or h.endswith("_residual")), None)
            if residual is not None:
                return read_column(path, residual)
    raise FileNotFoundError(f"no residual column found in {directory}")


@app.command("spectrum")
def spectrum_cmd(
    ctx: typer.Context,
    input_path: Path = InputOption,
    column: Optional[str] = ColumnOption,
    no_header: bool = NoHeaderOption,
    delimiter: str = DelimiterOption,
    residual_of: Optional[Path] = typer.Option(None, "--residual-of", file_okay=False, help="Output directory of a tendency/hp run"),
    max_bin: Optional[int] = typer.Option(None, "--max-bin", min=1, help="Keep DFT bins below this index"),
    out: Path = typer.Option(..., "--out", file_okay=False, help="Output directory"),
):
    """DFT modulus of a series (and of a stored residual)"""
    config = _config(ctx, max_bin=max_bin, output_dir=str(out))
    series = _load(input_path, column, no_header, delimiter).series

    reports = [dft_modulus(series, "modulus").truncate(config.max_bin)]
    if residual_of is not None:
        residual = _residual_from(residual_of)
        if residual.n != series.n:
            raise LengthMismatch(f"residual has {residual.n} samples, series has {series.n}")
        reports.append(dft_modulus(residual, "residual_modulus").truncate(config.max_bin))

    extra = {"residual_of": str(residual_of)} if residual_of is not None else {}
    with OutputDir(out, _manifest_config(config, "spectrum", input_path, **extra), config.seed) as target:
        target.write_table(
            "spectrum.csv",
            ["bin"] + [r.label for r in reports],
            [reports[0].frequencies] + [r.modulus for r in reports],
        )
    console.print(f"[green]{len(reports[0])} bins written to {out}[/green]")


async def _run_methods(
    series: TimeSeries,
    config: RunConfig,
) -> Tuple[TendencySplit, TendencySplit, HpResult]:
    decomp = itd_decompose(series, config.boundary)
    params = TendencyParams(p_star=config.p_star, n_lags=config.n_lags)
    return await asyncio.gather(
        asyncio.to_thread(split_tendency, series, Criterion.STC, config.boundary, params, decomp),
        asyncio.to_thread(split_tendency, series, Criterion.MAXEP, config.boundary, params, decomp),
        asyncio.to_thread(hp_trend, series, HpParams(lam=config.hp_lambda)),
    )


@app.command("report")
def report_cmd(
    ctx: typer.Context,
    input_path: Path = InputOption,
    column: Optional[str] = ColumnOption,
    no_header: bool = NoHeaderOption,
    delimiter: str = DelimiterOption,
    boundary: Optional[BoundaryPolicy] = BoundaryOption,
    p_star: Optional[float] = PStarOption,
    lags: Optional[int] = LagsOption,
    lam: Optional[float] = typer.Option(None, "--lambda", min=0.0, help="HP smoothing parameter"),
    max_bin: Optional[int] = typer.Option(None, "--max-bin", min=1, help="Keep DFT bins below this index"),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Seed recorded in the manifest"),
    out: Path = typer.Option(..., "--out", file_okay=False, help="Output directory"),
    plot: bool = PlotOption,
):
    """STC and MaxEP tendencies side by side with the HP trend"""
    config = _config(
        ctx, boundary=boundary, p_star=p_star, n_lags=lags, hp_lambda=lam,
        max_bin=max_bin, seed=seed, output_dir=str(out),
    )
    loaded = _load(input_path, column, no_header, delimiter)
    series = loaded.series

    stc, mep, hp = asyncio.run(_run_methods(series, config))
    original, stc_spec, hp_spec = residual_spectrum_report(series, stc.residual, hp.residual, config.max_bin)
    mep_spec = dft_modulus(mep.residual, "maxep_residual").truncate(config.max_bin)

    rows = [
        ("stc", f"p*={config.p_star:g}", str(stc.j_star), _split_error(series, stc.tendency, stc.residual)),
        ("maxep", "-", str(mep.j_star), _split_error(series, mep.tendency, mep.residual)),
        ("hp", f"lambda={_lambda_tag(hp.lam)}", "", _split_error(series, hp.trend, hp.residual)),
    ]

    manifest_config = _manifest_config(
        config, "report", input_path, stc_j_star=stc.j_star, maxep_j_star=mep.j_star,
    )
    with OutputDir(out, manifest_config, config.seed) as target:
        target.write_table("series.csv", *_frame(
            loaded,
            ("stc_tendency", stc.tendency.values),
            ("stc_residual", stc.residual.values),
            ("maxep_tendency", mep.tendency.values),
            ("maxep_residual", mep.residual.values),
            ("hp_trend", hp.trend.values),
            ("hp_residual", hp.residual.values),
        ))
        target.write_table(
            "report.csv",
            ["method", "parameter", "j_star", "max_split_error"],
            [[r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows], [r[3] for r in rows]],
        )
        target.write_table(
            "spectra.csv",
            ["bin", "original", "stc_residual", "maxep_residual", "hp_residual"],
            [original.frequencies, original.modulus, stc_spec.modulus, mep_spec.modulus, hp_spec.modulus],
        )
        if plot:
            write_plot_svg(
                [
                    series.with_label("series"),
                    stc.tendency.with_label(f"STC (j*={stc.j_star})"),
                    mep.tendency.with_label(f"MaxEP (j*={mep.j_star})"),
                    hp.trend.with_label(f"HP lambda={_lambda_tag(hp.lam)}"),
                ],
                target.path("report.svg"),
                title="Tendencies",
            )

    console.print(_split_table("Report", [(m, p, j, f"{e:.3g}") for m, p, j, e in rows]))
    console.print(f"[green]written to {out}[/green]")


# -- entry points ---------------------------------------------------------

def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and map the outcome to an exit code"""
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        result = app(args=args, prog_name="tendex", standalone_mode=False)
        return result if isinstance(result, int) else 0
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.UsageError as e:
        err_console.print(f"[red]Usage error:[/red] {escape(e.format_message())}")
        return 1
    except click.ClickException as e:
        err_console.print(f"[red]Error:[/red] {escape(e.format_message())}")
        return e.exit_code
    except click.exceptions.Abort:
        err_console.print("[red]Aborted[/red]")
        return 1
    except TendexError as e:
        err_console.print(f"[red]{type(e).__name__}:[/red] {escape(str(e))}")
        return e.exit_code
    except OSError as e:
        err_console.print(f"[red]I/O error:[/red] {escape(str(e))}")
        return 2


def entrypoint() -> None:
    sys.exit(run())


if __name__ == "__main__":
    entrypoint()
