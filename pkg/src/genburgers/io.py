"""CSV/JSON/SVG serialisation.

Solution CSV schema (one row per grid node and report time)::

    source,t,x,u

``source`` is ``mild`` or ``fd``. Floats are written with ``repr`` (shortest
round-trip form), so identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .field import Field
from .mild_solver import SolutionPatch, all_fields

SOLUTION_COLUMNS = ("source", "t", "x", "u")


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_rows(path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_solution_csv(path, sol, source: str = "mild") -> None:
    rows = ((source, f.t, x, u) for f in all_fields(sol) for x, u in zip(f.xs, f.values))
    write_rows(path, SOLUTION_COLUMNS, rows)


def read_solution_csv(path) -> dict:
    """``{source: [Field, ...]}``; far-field values are the edge samples."""
    data: dict = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["source"], float(row["t"]))
            data.setdefault(key, []).append((float(row["x"]), float(row["u"])))
    out: dict = {}
    for (source, t), pts in sorted(data.items()):
        xs, us = map(np.array, zip(*pts))
        out.setdefault(source, []).append(Field(t, xs, us, us[0], us[-1]))
    return out


def patch_metadata(patch: SolutionPatch) -> dict:
    return {
        "t0": patch.t0,
        "t_star": patch.t_star,
        "certified_step": patch.certified_step,
        "iterations": patch.iterations,
        "residual_history": list(patch.residual_history),
        "bound": patch.bound,
        "report_times": patch.times.tolist(),
    }


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


def pick_plot_times(fields, count: int = 6) -> list:
    """Up to ``count`` fields spread logarithmically in time."""
    if len(fields) <= count:
        return list(fields)
    times = np.array([f.t for f in fields])
    targets = np.geomspace(times[0], times[-1], count)
    idx = sorted({int(np.argmin(np.abs(np.log(times / tt)))) for tt in targets})
    return [fields[i] for i in idx]


def write_profiles_svg(path, fields, title: str = "") -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "genburgers"
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for f in pick_plot_times(fields):
        ax.plot(f.xs, f.values, lw=1.2, label=f"t = {f.t:.3g}")
    ax.set_xlabel("x")
    ax.set_ylabel("u(x, t)")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
