"""Deterministic rendering: aligned text tables, JSON-lines, plot data and SVG scatter plots.

Rounding happens only in text output. JSON-lines carry full precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Iterable, Sequence
from xml.sax.saxutils import escape

import numpy as np

from . import metrics
from .model import VolatilityReport

STYLES = ("volatility_top_n", "threshold", "tail", "table1", "topk_boost", "phi")
AXES = ("delta_vs_size", "reldelta_vs_size", "delta_vs_f", "cstar_vs_f")


# -- number formatting -------------------------------------------------------

def fixed(x: float, places: int) -> str:
    """Round half-up on the shortest decimal repr of ``x``."""
    q = Decimal(1).scaleb(-places)
    return str(Decimal(repr(float(x))).quantize(q, rounding=ROUND_HALF_UP))


def significant(x: float, digits: int = 4) -> str:
    """``x`` to ``digits`` significant figures in fixed notation; exactly zero prints as ``0``."""
    if x == 0:
        return "0"
    exponent = math.floor(math.log10(abs(x)))
    places = max(0, digits - 1 - exponent)
    s = fixed(x, places)
    # Rounding may carry into a new leading digit (9.9996 -> 10.000).
    if places and len(s.replace("-", "").replace(".", "").lstrip("0")) > digits:
        s = fixed(x, places - 1)
    return s


def percent(fraction: float, places: int = 0) -> str:
    return fixed(100 * fraction, places) + "%"


def _grouped(n: float) -> str:
    return f"{int(n):,}" if float(n).is_integer() else f"{n:,}"


def _plain(x: float) -> str:
    return f"{x:g}"


def _small_delta(x: float) -> str:
    # Three decimals, or two significant figures below 0.01.
    return fixed(x, 3) if abs(x) >= 0.01 or x == 0 else significant(x, 2)


def _relative_pct(fraction: float) -> str:
    # Three significant figures, at most two decimals.
    pct = 100 * fraction
    if pct == 0:
        return "0%"
    places = min(2, max(0, 2 - math.floor(math.log10(abs(pct)))))
    return fixed(pct, places) + "%"


def _share_pct(fraction: float) -> str:
    pct = 100 * fraction
    return fixed(pct, 2 if 0 < pct < 0.05 else 1) + "%"


# -- tables ------------------------------------------------------------------

@dataclass(frozen=True)
class RenderedTable:
    text: str
    jsonl: str


def _row_dict(row: Any) -> dict:
    if hasattr(row, "to_dict"):
        return row.to_dict()
    if hasattr(row, "__dataclass_fields__"):
        return asdict(row)
    if isinstance(row, dict):
        return dict(row)
    raise TypeError(f"cannot serialize row of type {type(row).__name__}")


def _cells(row: Any, style: str) -> list[str]:
    if style == "volatility_top_n":
        rel = "" if row.delta_f_r is None else percent(row.delta_f_r)
        return [str(row.rank), row.journal_id, fixed(row.delta_f, 2), str(row.c_star), rel,
                fixed(row.f, 2), fixed(row.f_star, 2), str(row.n2y)]
    if style == "threshold":
        t = percent(row.threshold) if row.mode == "relative" else _plain(row.threshold)
        return [t, str(row.count), _share_pct(row.fraction)]
    if style == "tail":
        threshold, count = row
        return [str(threshold), str(count)]
    if style == "table1":
        rel = "" if row.delta_f_r is None else _relative_pct(row.delta_f_r)
        return [row.label, _grouped(row.n1), _grouped(round(row.c1, 9)), _plain(row.f1), str(row.c),
                fixed(row.f2, 3), _small_delta(row.delta_f), rel]
    if style == "topk_boost":
        return [str(row.k), str(row.count), _share_pct(row.fraction)]
    if style == "phi":
        return [str(row.rank), row.journal_id, fixed(row.f, 2), str(row.n2y), fixed(row.phi, 2)]
    raise ValueError(f"unknown table style {style!r}; expected one of {STYLES}")


def _headers(style: str, rows: Sequence[Any]) -> list[str]:
    if style == "volatility_top_n":
        return ["#", "Journal", "Δf(c*)", "c*", "Δf_r(c*)", "f", "f*", "N2Y"]
    if style == "threshold":
        if rows[0].mode == "relative":
            return ["Relative volatility Δf_r(c*) (threshold)", "No. journals above threshold", "% all journals"]
        return ["Volatility Δf(c*) (threshold)", "No. journals above threshold", "% all journals"]
    if style == "tail":
        return ["Citation threshold c_t", "No. papers cited at least c_t times"]
    if style == "table1":
        return ["Journal", "Size N1", "Citations C1", "Initial IF f1", "New paper c",
                "Final IF f2", "Δf(c)", "Δf_r(c)"]
    if style == "topk_boost":
        return ["Top k papers removed", "No. journals boosted above threshold", "% all journals"]
    if style == "phi":
        return ["#", "Journal", "f", "N2Y", "Φ"]
    raise ValueError(f"unknown table style {style!r}; expected one of {STYLES}")


# Text-valued columns are left-aligned, numeric ones right-aligned.
_LEFT = {"volatility_top_n": {1}, "table1": {0}, "phi": {1}}


def render_table(rows: Sequence[Any], style: str) -> RenderedTable:
    """Aligned text table plus one JSON line per row.

    Row types by style: ``volatility_top_n`` takes ``corpus.RankRow``,
    ``threshold`` takes ``corpus.ThresholdRow``, ``tail`` takes
    ``(threshold, count)`` pairs, ``table1`` takes ``metrics.WhatIf``,
    ``topk_boost`` takes ``corpus.BoostRow`` and ``phi`` takes ``corpus.PhiRow``.
    """
    if style not in STYLES:
        raise ValueError(f"unknown table style {style!r}; expected one of {STYLES}")
    rows = list(rows)
    if not rows:
        raise ValueError("cannot render an empty table")
    header = _headers(style, rows)
    body = [_cells(r, style) for r in rows]
    widths = [max(len(line[i]) for line in [header, *body]) for i in range(len(header))]
    left = _LEFT.get(style, set())

    def fmt(line: list[str]) -> str:
        parts = [c.ljust(w) if i in left else c.rjust(w) for i, (c, w) in enumerate(zip(line, widths))]
        return "  ".join(parts).rstrip()

    text = "\n".join([fmt(header), fmt(["-" * w for w in widths])] + [fmt(b) for b in body]) + "\n"
    if style == "tail":
        dicts = [{"threshold": t, "count": c} for t, c in rows]
    else:
        dicts = [_row_dict(r) for r in rows]
    jsonl = "".join(json.dumps(d, ensure_ascii=False, allow_nan=False) + "\n" for d in dicts)
    return RenderedTable(text, jsonl)


# -- plot data ---------------------------------------------------------------

@dataclass(frozen=True)
class PlotPoint:
    journal_id: str
    x: float
    y: float
    size: int | None = None


@dataclass(frozen=True)
class ReferenceLine:
    """Straight line ``log10(y) = slope * log10(x) + intercept`` on log-log axes."""

    label: str
    slope: float
    intercept: float
    dashed: bool = False


@dataclass(frozen=True)
class PlotData:
    axes: str
    x_label: str
    y_label: str
    log_log: bool
    points: list[PlotPoint]
    excluded: int
    reference_lines: list[ReferenceLine] = field(default_factory=list)

    def points_jsonl(self) -> str:
        return "".join(json.dumps(asdict(p), allow_nan=False) + "\n" for p in self.points)

    def meta(self) -> dict:
        return {
            "axes": self.axes,
            "x_label": self.x_label,
            "y_label": self.y_label,
            "log_log": self.log_log,
            "point_count": len(self.points),
            "excluded": self.excluded,
            "reference_lines": [asdict(r) for r in self.reference_lines],
        }


def relative_reference_line(r: float) -> ReferenceLine:
    """Locus of constant relative volatility ``r`` in the (f, delta_f) plane.

    From ``delta_f_r = delta_f / f_star`` and ``f = f_star + delta_f`` it
    follows that ``delta_f = r * f / (1 + r)``.
    """
    return ReferenceLine(f"{fixed(100 * r, 0)}%", 1.0, math.log10(r / (1 + r)))


_AXIS_LABELS = {
    "delta_vs_size": ("N2Y", "Δf(c*)"),
    "reldelta_vs_size": ("N2Y", "Δf_r(c*)"),
    "delta_vs_f": ("f", "Δf(c*)"),
    "cstar_vs_f": ("f", "c*"),
}


def export_plot_data(reports: Iterable[VolatilityReport], axes: str) -> PlotData:
    """Log-log scatter data for one of the four volatility views.

    Journals with ``f == 0`` or ``f_star == 0`` are excluded and counted, as
    is any point whose coordinates are not strictly positive (all papers
    cited equally gives ``delta_f == 0``).
    """
    if axes not in AXES:
        raise ValueError(f"unknown axes {axes!r}; expected one of {AXES}")
    points: list[PlotPoint] = []
    excluded = 0
    for r in reports:
        if r.f == 0 or r.f_star == 0:
            excluded += 1
            continue
        if axes == "delta_vs_size":
            x, y, size = r.n2y, r.delta_f, None
        elif axes == "reldelta_vs_size":
            x, y, size = r.n2y, r.delta_f_r, None
        elif axes == "delta_vs_f":
            x, y, size = r.f, r.delta_f, r.n2y
        else:
            x, y, size = r.f, r.c_star, None
        if not (x > 0 and y > 0):
            excluded += 1
            continue
        points.append(PlotPoint(r.journal_id, float(x), float(y), size))
    lines: list[ReferenceLine] = []
    if axes == "delta_vs_f":
        lines = [relative_reference_line(r) for r in (1.0, 0.5, 0.25)]
        lines.append(ReferenceLine("f*=0", 1.0, 0.0, dashed=True))
    x_label, y_label = _AXIS_LABELS[axes]
    return PlotData(axes, x_label, y_label, True, points, excluded, lines)


@dataclass(frozen=True)
class SurfaceGrid:
    f1: float
    n1_values: np.ndarray
    c_values: np.ndarray
    values: np.ndarray  # values[i, j] = volatility at (n1_values[i], c_values[j])
    form: str

    def jsonl(self) -> str:
        out = []
        for i, n1 in enumerate(self.n1_values.tolist()):
            for j, c in enumerate(self.c_values.tolist()):
                out.append(json.dumps({"n1": n1, "c": c, "delta_f": float(self.values[i, j])}) + "\n")
        return "".join(out)


def surface_grid(
    f1: float, n1_range: Sequence[int], c_range: Sequence[int], form: str = "exact"
) -> SurfaceGrid:
    """Volatility over a grid of journal sizes (rows) and citation counts (columns).

    ``form`` selects ``(c - f1) / (n1 + 1)`` (``exact``) or ``(c - f1) / n1``
    (``approx``).
    """
    n1 = np.asarray(list(n1_range), dtype=np.int64)
    c = np.asarray(list(c_range), dtype=np.int64)
    if n1.size == 0 or c.size == 0:
        raise ValueError("grid ranges must be non-empty")
    if np.any(n1 < 1) or np.any(c < 0):
        raise ValueError("sizes must be >= 1 and citation counts >= 0")
    fn = {"exact": metrics.volatility_exact, "approx": metrics.volatility_approx}.get(form)
    if fn is None:
        raise ValueError("form must be 'exact' or 'approx'")
    values = np.array([[fn(int(cj), f1, int(ni)) for cj in c] for ni in n1], dtype=float)
    return SurfaceGrid(f1, n1, c, values, form)


# -- SVG -----------------------------------------------------------------------

@dataclass(frozen=True)
class SvgOptions:
    title: str = ""
    width: int = 800
    height: int = 600
    margin: int = 70
    marker_radius: float = 3.0
    max_bubble_radius: float = 14.0


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _axis_range(values: list[float], log: bool) -> tuple[float, float]:
    if log:
        lo = math.floor(math.log10(min(values)))
        hi = math.ceil(math.log10(max(values)))
        return (lo, hi if hi > lo else lo + 1)
    lo, hi = min(values), max(values)
    if hi == lo:
        lo, hi = lo - 1, hi + 1
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, log: bool) -> list[tuple[float, str]]:
    if log:
        return [(float(k), f"1e{k}" if not 0 <= k <= 3 else str(10 ** k)) for k in range(int(lo), int(hi) + 1)]
    return [(lo + i * (hi - lo) / 4, f"{lo + i * (hi - lo) / 4:.3g}") for i in range(5)]


def render_scatter_svg(plot_data: PlotData, options: SvgOptions | None = None) -> str:
    """SVG 1.1 scatter plot; identical input gives byte-identical output."""
    opt = options or SvgOptions()
    if not plot_data.points:
        raise ValueError("cannot plot empty data")
    log = plot_data.log_log
    tx = (lambda v: math.log10(v)) if log else (lambda v: v)
    xs = [tx(p.x) for p in plot_data.points]
    ys = [tx(p.y) for p in plot_data.points]
    x0, x1 = _axis_range([p.x for p in plot_data.points], log)
    y0, y1 = _axis_range([p.y for p in plot_data.points], log)
    m, w, h = opt.margin, opt.width, opt.height
    pw, ph = w - 2 * m, h - 2 * m

    def px(v: float) -> float:
        return m + (v - x0) / (x1 - x0) * pw

    def py(v: float) -> float:
        return h - m - (v - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        '<defs><clipPath id="plot-area">'
        f'<rect x="{m}" y="{m}" width="{pw}" height="{ph}"/></clipPath></defs>',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
        f'<rect class="frame" x="{m}" y="{m}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if opt.title:
        out.append(f'<text x="{w / 2:.2f}" y="{m / 2:.2f}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="16">{escape(opt.title)}</text>')
    for v, label in _ticks(x0, x1, log):
        out.append(f'<line class="tick" x1="{_fmt(px(v))}" y1="{h - m}" x2="{_fmt(px(v))}" y2="{h - m + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px(v))}" y="{h - m + 20}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{escape(label)}</text>')
    for v, label in _ticks(y0, y1, log):
        out.append(f'<line class="tick" x1="{m - 5}" y1="{_fmt(py(v))}" x2="{m}" y2="{_fmt(py(v))}" stroke="black"/>')
        out.append(f'<text x="{m - 8}" y="{_fmt(py(v) + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{escape(label)}</text>')
    out.append(f'<text x="{w / 2:.2f}" y="{h - 20}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="13">{escape(plot_data.x_label)}</text>')
    out.append(f'<text x="20" y="{h / 2:.2f}" text-anchor="middle" font-family="sans-serif" font-size="13" '
               f'transform="rotate(-90 20 {h / 2:.2f})">{escape(plot_data.y_label)}</text>')

    if log:
        for line in plot_data.reference_lines:
            ya, yb = line.slope * x0 + line.intercept, line.slope * x1 + line.intercept
            dash = ' stroke-dasharray="6 4"' if line.dashed else ""
            out.append(f'<line class="reference" x1="{_fmt(px(x0))}" y1="{_fmt(py(ya))}" '
                       f'x2="{_fmt(px(x1))}" y2="{_fmt(py(yb))}" stroke="gray"{dash} '
                       f'clip-path="url(#plot-area)"><title>{escape(line.label)}</title></line>')

    sizes = [p.size for p in plot_data.points if p.size is not None]
    biggest = max(sizes) if sizes else None
    for p, xv, yv in zip(plot_data.points, xs, ys):
        r = opt.marker_radius
        if p.size is not None and biggest:
            r = 1.5 + (opt.max_bubble_radius - 1.5) * math.sqrt(p.size / biggest)
        out.append(f'<circle class="marker" cx="{_fmt(px(xv))}" cy="{_fmt(py(yv))}" r="{_fmt(r)}" '
                   f'fill="steelblue" fill-opacity="0.6"><title>{escape(p.journal_id)}</title></circle>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
