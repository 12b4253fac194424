# bresse/reports/svg_plot.py

import io
import os
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..config import PLOT_DPI, PLOT_FIGSIZE, SVG_HASH_SALT  # noqa: E402
from ..exceptions import ReportError  # noqa: E402
from .csv_report import atomic_write_text, read_csv_report  # noqa: E402

# kind -> (x column, y column, x label, y label)
PLOT_KINDS = {
    "energy": ("t", "E", "t", "log10 E"),
    "spectrum": ("re", "im", "Re lambda", "Im lambda"),
    "resolvent": ("lambda", "norm", "lambda", "resolvent norm"),
}

SERIES_ID = "series"

_RC = {
    "svg.hashsalt": SVG_HASH_SALT,
    "svg.fonttype": "none",
    "path.simplify": False,
}


def emit_plot(csv_path: str, kind: str, out_path: Optional[str] = None) -> str:
    """
    Render a CSV report as a deterministic SVG.

    Args:
        csv_path: Report written by the pipeline
        kind: "energy" (log-energy vs t), "spectrum" (eigenvalue cloud) or
            "resolvent" (norm vs lambda)
        out_path: Target file; defaults to the CSV path with .svg

    Returns:
        Path of the SVG. The data series is the element with id "series";
        an empty report gives axes only.

    Raises:
        ReportError: unknown kind or missing columns
    """
    if kind not in PLOT_KINDS:
        raise ReportError(f"unknown plot kind '{kind}', expected one of {sorted(PLOT_KINDS)}")
    x_col, y_col, x_label, y_label = PLOT_KINDS[kind]
    data = read_csv_report(csv_path, required=(x_col, y_col))
    x, y = data[x_col], data[y_col]

    if kind == "energy":
        keep = y > 0.0
        x, y = x[keep], np.log10(y[keep])
    else:
        keep = np.isfinite(x) & np.isfinite(y)
        x, y = x[keep], y[keep]

    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=PLOT_FIGSIZE, dpi=PLOT_DPI)
        try:
            if x.size:
                if kind == "spectrum":
                    ax.plot(x, y, linestyle="none", marker="o", markersize=3, gid=SERIES_ID)
                    ax.axvline(0.0, color="0.6", linewidth=0.8)
                else:
                    ax.plot(x, y, linewidth=1.2, gid=SERIES_ID)
                    if kind == "resolvent":
                        ax.set_yscale("log")
            ax.set_xlabel(x_label)
            ax.set_ylabel(y_label)
            ax.grid(True, alpha=0.3)
            buffer = io.StringIO()
            fig.savefig(buffer, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)

    out_path = out_path or os.path.splitext(csv_path)[0] + ".svg"
    return atomic_write_text(out_path, buffer.getvalue())
