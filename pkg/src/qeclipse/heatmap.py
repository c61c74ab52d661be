"""Plain-text SVG heat maps of grid estimates with a phase-curve overlay.

Columns run along ``log2(1/sigma^2)``, rows along ``log2(m/n)`` (larger m at
the top).  Cell colour is a linear RGB ramp from ``LOW_COLOUR`` (estimate 0)
to ``HIGH_COLOUR`` (estimate 1).  Output bytes depend only on the inputs.
"""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from qeclipse.harness import PhaseCurve, _grid_for_delta

LOW_COLOUR = "#f7fbff"
HIGH_COLOUR = "#08306b"

CELL_W = 44
CELL_H = 32
LEFT = 72
TOP = 44
RIGHT = 24
BOTTOM = 64


def _rgb(hex_colour):
    return tuple(int(hex_colour[i : i + 2], 16) for i in (1, 3, 5))


def colour(p: float) -> str:
    """Hex colour of an estimate in [0, 1] on the two-colour ramp."""
    p = min(1.0, max(0.0, float(p)))
    lo, hi = _rgb(LOW_COLOUR), _rgb(HIGH_COLOUR)
    return "#" + "".join(f"{round(a + (b - a) * p):02x}" for a, b in zip(lo, hi))


def _num(x: float) -> str:
    text = f"{x:.2f}".rstrip("0").rstrip(".")
    return "0" if text == "-0" else text


def heatmap_svg(rows, delta: float, curve: PhaseCurve | None, field_name: str = "p_bbar_hat") -> str:
    ms, sigmas, table = _grid_for_delta(rows, delta, field_name)
    n = next(row.n for row in rows if row.delta == delta)
    cols = sorted(sigmas, key=lambda s: -2 * math.log2(s))  # increasing log2(1/sigma^2)
    lines = sorted(ms, reverse=True)  # top line is the largest m
    width = LEFT + CELL_W * len(cols) + RIGHT
    height = TOP + CELL_H * len(lines) + BOTTOM
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<text x="{LEFT}" y="{TOP - 16}" font-size="13">'
        f"{escape(field_name)}, delta = {_num(delta)} (colour {LOW_COLOUR} = 0, {HIGH_COLOUR} = 1)</text>",
    ]
    col_x = {s: LEFT + CELL_W * i for i, s in enumerate(cols)}
    row_y = {m: TOP + CELL_H * i for i, m in enumerate(lines)}
    for m in lines:
        for s in cols:
            p = table[(m, s)]
            out.append(
                f'<rect x="{col_x[s]}" y="{row_y[m]}" width="{CELL_W}" height="{CELL_H}" '
                f'fill="{colour(p)}"><title>m={m} sigma={_num(s)} p={p:.4f}</title></rect>'
            )
    bottom = TOP + CELL_H * len(lines)
    right = LEFT + CELL_W * len(cols)
    out.append(f'<line x1="{LEFT}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>')
    out.append(f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{bottom}" stroke="black"/>')
    for s in cols:
        cx = col_x[s] + CELL_W / 2
        out.append(f'<text x="{_num(cx)}" y="{bottom + 14}" text-anchor="middle">{_num(-2 * math.log2(s))}</text>')
    for m in lines:
        cy = row_y[m] + CELL_H / 2 + 4
        out.append(f'<text x="{LEFT - 6}" y="{_num(cy)}" text-anchor="end">{_num(math.log2(m / n))}</text>')
    out.append(
        f'<text x="{_num((LEFT + right) / 2)}" y="{bottom + 36}" text-anchor="middle">log2(1/sigma^2)</text>'
    )
    out.append(
        f'<text x="16" y="{_num((TOP + bottom) / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_num((TOP + bottom) / 2)})">log2(m/n)</text>'
    )
    if curve is not None:
        pts = [(s, m) for s, m in curve.points if m is not None and s in col_x and m in row_y]
        if pts:
            pts.sort(key=lambda p: col_x[p[0]])
            coords = " ".join(
                f"{_num(col_x[s] + CELL_W / 2)},{_num(row_y[m] + CELL_H / 2)}" for s, m in pts
            )
            out.append(f'<polyline points="{coords}" fill="none" stroke="#d7301f" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_heatmap(rows, delta: float, curve: PhaseCurve | None, out_path, field_name: str = "p_bbar_hat") -> Path:
    path = Path(out_path)
    path.write_text(heatmap_svg(rows, delta, curve, field_name), encoding="utf-8", newline="")
    return path
