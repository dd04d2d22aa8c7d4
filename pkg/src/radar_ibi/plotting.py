"""Standalone SVG chart emission; no display server required."""

from __future__ import annotations

import os
import tempfile

__all__ = ["plot_csv", "plot_columns"]


def _load_matplotlib():
    import matplotlib

    matplotlib.use("svg", force=True)
    import matplotlib.pyplot as plt

    return plt


def _read_table(path):
    """CSV loader tolerant of header/no-header numeric tables."""
    import numpy as np

    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().strip()
        rest = fh.read()
    try:
        [float(v) for v in first.split(",")]
        names = None
        body = first + "\n" + rest
    except ValueError:
        names = [c.strip() for c in first.split(",")]
        body = rest
    rows = []
    for line in body.splitlines():
        line = line.strip()
        if not line:
            continue
        rows.append([float(v) for v in line.split(",")])
    data = np.asarray(rows)
    if names is None:
        names = [f"col{i}" for i in range(data.shape[1])]
    return names, data


def _column(names, data, key, default_idx):
    if key is None:
        return default_idx, names[default_idx]
    if key in names:
        idx = names.index(key)
        return idx, key
    try:
        idx = int(key)
    except ValueError:
        raise ValueError(f"unknown column {key!r}; available: {names}") from None
    return idx, names[idx]


def plot_columns(csv_path, out_path, x=None, y=None, style="line",
                 annotate_cutoff=None, logy=False, title=None):
    """Render one CSV column against another as a standalone SVG.

    annotate_cutoff: optional cutoff-selection dict (f_h1/f_h2/f_c keys);
    draws labeled vertical markers, useful on PSD plots.
    """
    import numpy as np

    plt = _load_matplotlib()
    names, data = _read_table(csv_path)
    xi, xname = _column(names, data, x, 0)
    yi, yname = _column(names, data, y, 1 if data.shape[1] > 1 else 0)
    fig, ax = plt.subplots(figsize=(7, 4))
    xv, yv = data[:, xi], data[:, yi]
    ok = np.isfinite(xv) & np.isfinite(yv)
    if style == "scatter":
        ax.plot(xv[ok], yv[ok], ".", markersize=4)
    else:
        ax.plot(xv[ok], yv[ok], lw=1.0)
    if logy:
        ax.set_yscale("log")
    if annotate_cutoff:
        for key, color in (("f_h1", "tab:green"), ("f_h2", "tab:orange"), ("f_c", "tab:red")):
            val = annotate_cutoff.get(key)
            if val is not None:
                ax.axvline(val, color=color, ls="--", lw=1.0, label=f"{key} = {val:.3g}")
        ax.legend(fontsize=8)
    ax.set_xlabel(xname)
    ax.set_ylabel(yname)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    directory = os.path.dirname(os.path.abspath(out_path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".svg")
    os.close(fd)
    try:
        fig.savefig(tmp, format="svg")
        os.replace(tmp, out_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        plt.close(fig)


def plot_csv(csv_path, out_path, **kwargs):
    plot_columns(csv_path, out_path, **kwargs)
