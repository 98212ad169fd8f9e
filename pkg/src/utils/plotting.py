"""Static SVG line plots of one or more series"""

from io import StringIO
from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")

from matplotlib.figure import Figure  # noqa: E402

from .dataio import atomic_write_text  # noqa: E402
from ..core.series import TimeSeries  # noqa: E402

PALETTE = ("#7f7f7f", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2")

# fixed ids and no timestamp keep identical inputs byte-identical
_SVG_RC = {"svg.hashsalt": "tendex", "svg.fonttype": "none"}


def series_gid(k: int) -> str:
    return f"series-{k}"


def write_plot_svg(
    series_list: Sequence[TimeSeries],
    path: Union[str, Path],
    title: Optional[str] = None,
    width: float = 8.0,
    height: float = 4.0,
) -> Path:
    """One polyline per series, each tagged ``series-<k>`` in the SVG"""
    if not series_list:
        raise ValueError("nothing to plot")

    with matplotlib.rc_context(_SVG_RC):
        fig = Figure(figsize=(width, height))
        ax = fig.add_subplot()
        for k, series in enumerate(series_list):
            ax.plot(
                range(series.n),
                series.values,
                color=PALETTE[k % len(PALETTE)],
                linewidth=1.0 if k == 0 else 1.5,
                label=series.label or series_gid(k),
                gid=series_gid(k),
            )
        ax.set_xlabel("i")
        if title:
            ax.set_title(title)
        if len(series_list) > 1:
            ax.legend(loc="best", fontsize="small")
        fig.tight_layout()

        buffer = StringIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None})

    return atomic_write_text(path, buffer.getvalue())
