"""CSV and SVG export of sweep tables."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import OutputError
from .sweep import SweepTable


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def csv_columns(table: SweepTable) -> list[tuple[str, np.ndarray]]:
    """Flattened real-valued columns; complex columns split into ``_re``/``_im``."""
    out = []
    for name, col in table.columns.items():
        col = np.asarray(col)
        if np.iscomplexobj(col):
            out.append((f"{name}_re", col.real))
            out.append((f"{name}_im", col.imag))
        else:
            out.append((name, col.astype(float)))
    return out


def emit_csv(table: SweepTable, path) -> Path:
    """Write ``table`` as CSV, plus a ``.meta.json`` sidecar with axis name and metadata.

    The header is ``axis,<col>,...``. An ``error`` column is appended only when
    some rows failed.
    """
    path = Path(path)
    cols = csv_columns(table)
    with_errors = any(table.errors)
    header = ["axis"] + [name for name, _ in cols] + (["error"] if with_errors else [])
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for i, x in enumerate(table.axis_values):
                row = [_fmt(x)] + [_fmt(col[i]) for _, col in cols]
                if with_errors:
                    row.append(table.errors[i])
                writer.writerow(row)
        meta = {
            "axis_name": table.axis_name,
            "columns": header[1:],
            "metadata": table.metadata,
        }
        path.with_suffix(".meta.json").write_text(json.dumps(meta, indent=2, default=str) + "\n")
    except OSError as exc:
        raise OutputError(path, exc.strerror or str(exc)) from exc
    return path


def read_csv(path):
    """Read a CSV written by :func:`emit_csv`; returns ``(header, float rows)``."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        numeric = len(header) - (1 if header[-1] == "error" else 0)
        rows = [[float(v) for v in row[:numeric]] for row in reader]
    return header, rows


# --- SVG -----------------------------------------------------------------------

WIDTH, HEIGHT = 800, 500
MARGIN = dict(left=90, right=160, top=30, bottom=60)
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf"]


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return []
    if hi == lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _segments(xs, ys):
    seg = []
    for x, y in zip(xs, ys):
        if math.isfinite(x) and math.isfinite(y):
            seg.append((x, y))
        elif seg:
            yield seg
            seg = []
    if seg:
        yield seg


def render_svg(table: SweepTable, title: str = "", columns=None) -> str:
    """Line plot of the table's (real-valued) columns against the axis."""
    cols = [(n, c) for n, c in csv_columns(table) if columns is None or n in columns]
    x = np.asarray(table.axis_values, dtype=float)
    finite = [c[np.isfinite(c)] for _, c in cols]
    finite = [c for c in finite if c.size]
    ylo = min((float(c.min()) for c in finite), default=0.0)
    yhi = max((float(c.max()) for c in finite), default=1.0)
    if ylo == yhi:
        ylo, yhi = ylo - 0.5 * (abs(ylo) or 1.0), yhi + 0.5 * (abs(yhi) or 1.0)
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad
    xlo, xhi = float(np.nanmin(x)), float(np.nanmax(x))
    if xlo == xhi:
        xlo, xhi = xlo - 0.5, xhi + 0.5

    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]

    def px(v):
        return x0 + (v - xlo) / (xhi - xlo) * (x1 - x0)

    def py(v):
        return y0 + (v - ylo) / (yhi - ylo) * (y1 - y0)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="black"/>',
    ]
    for t in nice_ticks(xlo, xhi):
        X = px(t)
        out.append(f'<line x1="{X:.2f}" y1="{y0}" x2="{X:.2f}" y2="{y0 + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{y0 + 20}" font-size="12" text-anchor="middle">{t:.4g}</text>')
    for t in nice_ticks(ylo, yhi):
        Y = py(t)
        out.append(f'<line x1="{x0 - 5}" y1="{Y:.2f}" x2="{x0}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{x0 - 8}" y="{Y + 4:.2f}" font-size="12" text-anchor="end">{t:.4g}</text>')
    if ylo < 0 < yhi:
        out.append(f'<line x1="{x0}" y1="{py(0):.2f}" x2="{x1}" y2="{py(0):.2f}" stroke="#bbbbbb" stroke-dasharray="4 3"/>')
    unit = table.metadata.get("axis_unit", "")
    xlabel = f"{table.axis_name} [{unit}]" if unit else table.axis_name
    out.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 15}" font-size="14" text-anchor="middle">{xlabel}</text>')
    if title:
        out.append(f'<text x="{(x0 + x1) / 2:.1f}" y="20" font-size="15" text-anchor="middle">{title}</text>')
    for i, (name, col) in enumerate(cols):
        color = PALETTE[i % len(PALETTE)]
        for seg in _segments(x, col):
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in seg)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = y1 + 18 * (i + 1)
        out.append(f'<line x1="{x1 + 10}" y1="{ly - 4}" x2="{x1 + 30}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{x1 + 35}" y="{ly}" font-size="12">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(table: SweepTable, path, title: str = "", columns=None) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(render_svg(table, title, columns))
    except OSError as exc:
        raise OutputError(path, exc.strerror or str(exc)) from exc
    return path
