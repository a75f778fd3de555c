"""Minimal static line plots written straight to SVG text.

Output depends only on the input CSV and style, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")

DEFAULT_STYLE = {
    "width": 640,
    "height": 420,
    "title": "",
    "x_label": "",
    "y_label": "",
    "log_x": False,
    "log_y": False,
}


class CsvParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_csv(text: str) -> tuple[list[str], list[list[float]]]:
    """Header plus numeric rows; ``#`` lines are comments, empty cells become NaN."""
    header: list[str] | None = None
    rows: list[list[float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if header is None:
            header = cells
            continue
        if len(cells) != len(header):
            raise CsvParseError(lineno, f"expected {len(header)} fields, found {len(cells)}")
        try:
            rows.append([float(c) if c else math.nan for c in cells])
        except ValueError as exc:
            raise CsvParseError(lineno, str(exc)) from None
    if header is None:
        raise CsvParseError(1, "missing header row")
    return header, rows


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:.3g}"


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


def render_svg(csv_text: str, style: dict | None = None) -> str:
    """Plot every non-x column of a CSV as a polyline against the first column."""
    st = dict(DEFAULT_STYLE)
    st.update(style or {})
    header, rows = parse_csv(csv_text)
    W, H = int(st["width"]), int(st["height"])
    left, right, top, bottom = 70, 150, 40, 50
    pw, ph = W - left - right, H - top - bottom

    def tx(v):
        return math.log10(v) if st["log_x"] else v

    def ty(v):
        return math.log10(v) if st["log_y"] else v

    pts = [(tx(r[0]), ty(r[k])) for r in rows for k in range(1, len(header))
           if _plottable(r[0], st["log_x"]) and _plottable(r[k], st["log_y"])]
    if pts:
        x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
        y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<g id="axes" stroke="black" stroke-width="1">',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}"/>',
        "</g>",
    ]
    for v in _nice_ticks(x0, x1):
        X = _fmt(sx(v))
        lab = _tick_label(10**v if st["log_x"] else v)
        out.append(f'<line x1="{X}" y1="{top + ph}" x2="{X}" y2="{top + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{X}" y="{top + ph + 16}" font-size="10" text-anchor="middle">{lab}</text>')
    for v in _nice_ticks(y0, y1):
        Y = _fmt(sy(v))
        lab = _tick_label(10**v if st["log_y"] else v)
        out.append(f'<line x1="{left - 4}" y1="{Y}" x2="{left}" y2="{Y}" stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{Y}" font-size="10" text-anchor="end">{lab}</text>')
    if st["title"]:
        out.append(f'<text x="{left + pw / 2:.1f}" y="20" font-size="13" text-anchor="middle">'
                   f'{escape(st["title"])}</text>')
    if st["x_label"]:
        out.append(f'<text x="{left + pw / 2:.1f}" y="{H - 12}" font-size="11" text-anchor="middle">'
                   f'{escape(st["x_label"])}</text>')
    if st["y_label"]:
        out.append(f'<text x="16" y="{top + ph / 2:.1f}" font-size="11" text-anchor="middle" '
                   f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(st["y_label"])}</text>')

    for k, name in enumerate(header[1:], start=1):
        color = PALETTE[(k - 1) % len(PALETTE)]
        coords = [f"{_fmt(sx(tx(r[0])))},{_fmt(sy(ty(r[k])))}" for r in rows
                  if _plottable(r[0], st["log_x"]) and _plottable(r[k], st["log_y"])]
        out.append(f'<polyline class="series" data-label="{escape(name)}" fill="none" '
                   f'stroke="{color}" stroke-width="1.5" points="{" ".join(coords)}"/>')
        ly = top + 14 * k
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text class="legend" x="{left + pw + 34}" y="{ly + 4}" font-size="10">'
                   f'{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _plottable(v: float, log: bool) -> bool:
    return math.isfinite(v) and (v > 0 or not log)


def render_svg_file(csv_path: str | Path, svg_path: str | Path, style: dict | None = None) -> Path:
    text = Path(csv_path).read_text()
    svg_path = Path(svg_path)
    svg_path.write_text(render_svg(text, style), newline="\n")
    return svg_path
