"""Self-contained SVG charts for wealth-trajectory percentile bands.

One chart per strategy: round index on x, wealth on a log y scale, the
5-95 band shaded lightly, the 25-75 band more strongly, and the median as
a line. A dashed rule marks the initial wealth so growth and decay read at
a glance. No external assets, scripts, or fonts beyond generic families.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

# Wealth of exactly zero (a ruined percentile) still needs a y position.
_CLAMP = 1e-12

_WIDTH = 720
_HEIGHT = 400
_MARGIN_LEFT = 64
_MARGIN_RIGHT = 16
_MARGIN_TOP = 34
_MARGIN_BOTTOM = 40


def _nice_ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / max(count, 1)
    power = 10.0 ** math.floor(math.log10(raw))
    step = min(s for s in (1.0, 2.0, 5.0, 10.0) if s * power >= raw) * power
    first = math.ceil(lo / step) * step
    ticks = []
    value = first
    while value <= hi + 1e-9 * step:
        ticks.append(value)
        value += step
    return ticks


def _fmt(value: float) -> str:
    return format(value, ".6g")


def band_chart(
    t: np.ndarray,
    p5: np.ndarray,
    p25: np.ndarray,
    p50: np.ndarray,
    p75: np.ndarray,
    p95: np.ndarray,
    title: str = "",
) -> str:
    """Render percentile bands to an SVG string."""
    series = {"p5": p5, "p25": p25, "p50": p50, "p75": p75, "p95": p95}
    t = np.asarray(t, dtype=float)
    arrays = {}
    for name, values in series.items():
        values = np.asarray(values, dtype=float)
        if values.shape != t.shape or values.ndim != 1 or t.size == 0:
            raise ValueError(f"band {name} must match t in length, one-dimensional")
        arrays[name] = np.log10(np.maximum(values, _CLAMP))

    x_lo, x_hi = float(t.min()), float(t.max())
    if x_hi <= x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_lo = min(float(a.min()) for a in arrays.values())
    y_hi = max(float(a.max()) for a in arrays.values())
    y_lo, y_hi = min(y_lo, 0.0), max(y_hi, 0.0)  # keep the unit line visible
    if y_hi - y_lo < 0.1:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def sx(value: float) -> float:
        return _MARGIN_LEFT + (value - x_lo) / (x_hi - x_lo) * plot_w

    def sy(log_value: float) -> float:
        return _MARGIN_TOP + (y_hi - log_value) / (y_hi - y_lo) * plot_h

    def points(xs: np.ndarray, logs: np.ndarray) -> str:
        return " ".join(f"{sx(x):.2f},{sy(v):.2f}" for x, v in zip(xs, logs))

    def band_polygon(lower: np.ndarray, upper: np.ndarray, fill: str, opacity: str) -> str:
        ring = points(t, upper) + " " + points(t[::-1], lower[::-1])
        return f'<polygon points="{ring}" fill="{fill}" fill-opacity="{opacity}" stroke="none"/>'

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_WIDTH / 2:.0f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="15" fill="#222">{escape(title)}</text>'
        )

    # Horizontal grid and y labels at whole decades when room allows,
    # otherwise at nice fractional log positions.
    decades = [v for v in range(math.floor(y_lo), math.ceil(y_hi) + 1) if y_lo <= v <= y_hi]
    y_ticks = [float(v) for v in decades] if len(decades) >= 2 else _nice_ticks(y_lo, y_hi)
    for tick in y_ticks:
        y = sy(tick)
        parts.append(
            f'<line x1="{_MARGIN_LEFT}" y1="{y:.2f}" x2="{_WIDTH - _MARGIN_RIGHT}" '
            f'y2="{y:.2f}" stroke="#dddddd" stroke-width="1"/>'
        )
        label = _fmt(10.0**tick)
        parts.append(
            f'<text x="{_MARGIN_LEFT - 6}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11" fill="#555">{label}</text>'
        )
    for tick in _nice_ticks(x_lo, x_hi):
        x = sx(tick)
        parts.append(
            f'<line x1="{x:.2f}" y1="{_HEIGHT - _MARGIN_BOTTOM}" x2="{x:.2f}" '
            f'y2="{_HEIGHT - _MARGIN_BOTTOM + 4}" stroke="#999999" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{_HEIGHT - _MARGIN_BOTTOM + 17}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11" fill="#555">{_fmt(tick)}</text>'
        )

    parts.append(band_polygon(arrays["p5"], arrays["p95"], "#6a9fd8", "0.25"))
    parts.append(band_polygon(arrays["p25"], arrays["p75"], "#3f7cc1", "0.35"))

    unit_y = sy(0.0)
    parts.append(
        f'<polyline class="unit" points="{_MARGIN_LEFT},{unit_y:.2f} '
        f'{_WIDTH - _MARGIN_RIGHT},{unit_y:.2f}" fill="none" stroke="#888888" '
        f'stroke-width="1" stroke-dasharray="5,4"/>'
    )
    if t.size == 1:
        x, y = sx(t[0]), sy(arrays["p50"][0])
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3.5" fill="#16436e"/>')
    parts.append(
        f'<polyline class="median" points="{points(t, arrays["p50"])}" fill="none" '
        f'stroke="#16436e" stroke-width="2"/>'
    )

    axis = (
        f'<polyline points="{_MARGIN_LEFT},{_MARGIN_TOP} {_MARGIN_LEFT},'
        f'{_HEIGHT - _MARGIN_BOTTOM} {_WIDTH - _MARGIN_RIGHT},{_HEIGHT - _MARGIN_BOTTOM}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>'
    )
    parts.append(axis)
    parts.append(
        f'<text x="{_WIDTH / 2:.0f}" y="{_HEIGHT - 8}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" fill="#333">round</text>'
    )
    parts.append(
        f'<text x="16" y="{_HEIGHT / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" fill="#333" '
        f'transform="rotate(-90 16 {_HEIGHT / 2:.0f})">wealth</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts)
