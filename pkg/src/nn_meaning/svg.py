"""Self-contained SVG line charts for report rows (no external assets)."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

_WIDTH, _HEIGHT = 800, 500
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 170, 40, 55

_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def emit_svg(
    rows: Sequence,
    x: str,
    y: str,
    series: str,
    path: str | Path,
    title: str | None = None,
) -> None:
    """Render one polyline per distinct ``series`` value; log-scale x when x is "dim"."""
    if not rows:
        raise ValueError("no rows to plot")
    for name in (x, y, series):
        if not hasattr(rows[0], name):
            raise ValueError(f"rows have no field {name!r}")

    log_x = x == "dim"

    def tx(v: float) -> float:
        if log_x:
            if v <= 0:
                raise ValueError(f"log-scale x needs positive values, got {v}")
            return math.log10(v)
        return float(v)

    groups: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        key = str(getattr(row, series))
        groups.setdefault(key, []).append((float(getattr(row, x)), float(getattr(row, y))))
    for pts in groups.values():
        pts.sort()

    xs = sorted({p[0] for pts in groups.values() for p in pts})
    ys = [p[1] for pts in groups.values() for p in pts]
    x_lo, x_hi = tx(xs[0]), tx(xs[-1])
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_lo, y_hi = min(ys), max(ys)
    pad = 0.05 * (y_hi - y_lo) or max(0.5, abs(y_hi) * 0.05)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM

    def px(v: float) -> float:
        return _LEFT + (tx(v) - x_lo) / (x_hi - x_lo) * plot_w

    def py(v: float) -> float:
        return _TOP + (y_hi - v) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15">{title}</text>'
        )

    # axes
    x0, y0 = _LEFT, _TOP + plot_h
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0 + plot_w}" y2="{y0}" stroke="black"/>'
    )
    parts.append(f'<line x1="{x0}" y1="{_TOP}" x2="{x0}" y2="{y0}" stroke="black"/>')

    x_ticks = xs if len(xs) <= 12 else xs[:: max(1, len(xs) // 12)]
    for v in x_ticks:
        parts.append(
            f'<line x1="{px(v):.1f}" y1="{y0}" x2="{px(v):.1f}" y2="{y0 + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{px(v):.1f}" y="{y0 + 18}" text-anchor="middle">{_fmt(v)}</text>'
        )
    for i in range(6):
        v = y_lo + i * (y_hi - y_lo) / 5
        parts.append(
            f'<line x1="{x0 - 5}" y1="{py(v):.1f}" x2="{x0}" y2="{py(v):.1f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x0 - 8}" y="{py(v) + 4:.1f}" text-anchor="end">{_fmt(v)}</text>'
        )
    x_label = f"{x} (log scale)" if log_x else x
    parts.append(
        f'<text x="{x0 + plot_w / 2:.1f}" y="{_HEIGHT - 12}" text-anchor="middle">{x_label}</text>'
    )
    parts.append(
        f'<text x="18" y="{_TOP + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_TOP + plot_h / 2:.1f})">{y}</text>'
    )

    for i, (key, pts) in enumerate(groups.items()):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{px(vx):.2f},{py(vy):.2f}" for vx, vy in pts)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        for vx, vy in pts:
            parts.append(
                f'<circle cx="{px(vx):.2f}" cy="{py(vy):.2f}" r="3" fill="{color}"/>'
            )
        ly = _TOP + 10 + i * 20
        lx = _WIDTH - _RIGHT + 20
        parts.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(f'<text x="{lx + 30}" y="{ly + 4}">{key}</text>')

    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
