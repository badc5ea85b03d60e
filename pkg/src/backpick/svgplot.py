"""Direct SVG rendering of selection efficiency curves, no plotting stack.

One chart overlays several curves: a shaded quartile band and a median
polyline per strategy, plus optional dashed horizontal baselines for
externally recommended backbones.
"""

from __future__ import annotations

import math

from .core import BsecCurve

_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2")

_WIDTH, _HEIGHT = 760, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 176, 28, 48


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def _fmt(value: float) -> str:
    if value == 0:
        return "0"
    if abs(value) >= 1000 or abs(value) < 0.01:
        return f"{value:.3g}"
    return f"{value:.3g}"


def render_bsec_svg(
    curves: list[BsecCurve],
    baselines: list[tuple[str, float]] | None = None,
    title: str = "",
    log_x: bool = False,
) -> str:
    """Render curves to an SVG document string."""
    baselines = baselines or []
    xs = [p.t_max_seconds for c in curves for p in c.points]
    ys = [v for c in curves for p in c.points for v in (p.p25, p.median, p.p75)]
    ys.extend(v for _, v in baselines)
    if not xs or not ys:
        raise ValueError("nothing to plot: all curves are empty")

    if log_x:
        to_x_domain = lambda t: math.log10(t)
    else:
        to_x_domain = lambda t: t
    x_lo = min(to_x_domain(x) for x in xs)
    x_hi = max(to_x_domain(x) for x in xs)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    y_lo, y_hi = min(ys), max(ys)
    pad = 0.05 * (y_hi - y_lo) or 0.05
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(t: float) -> float:
        return _MARGIN_L + (to_x_domain(t) - x_lo) / (x_hi - x_lo) * plot_w

    def py(v: float) -> float:
        return _MARGIN_T + (y_hi - v) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_MARGIN_L}" y="18" font-size="14" font-weight="bold">{title}</text>'
        )

    # Axes and ticks.
    axis_y = _HEIGHT - _MARGIN_B
    parts.append(
        f'<line x1="{_MARGIN_L}" y1="{axis_y}" x2="{_WIDTH - _MARGIN_R}" y2="{axis_y}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" y2="{axis_y}" stroke="black"/>'
    )
    for tick in _ticks(x_lo, x_hi):
        x = _MARGIN_L + (tick - x_lo) / (x_hi - x_lo) * plot_w
        label = _fmt(10**tick) if log_x else _fmt(tick)
        parts.append(f'<line x1="{x:.1f}" y1="{axis_y}" x2="{x:.1f}" y2="{axis_y + 4}" stroke="black"/>')
        parts.append(f'<text x="{x:.1f}" y="{axis_y + 18}" text-anchor="middle">{label}</text>')
    for tick in _ticks(y_lo, y_hi):
        y = py(tick)
        parts.append(f'<line x1="{_MARGIN_L - 4}" y1="{y:.1f}" x2="{_MARGIN_L}" y2="{y:.1f}" stroke="black"/>')
        parts.append(
            f'<text x="{_MARGIN_L - 8}" y="{y + 4:.1f}" text-anchor="end">{_fmt(tick)}</text>'
        )
    parts.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{_HEIGHT - 10}" text-anchor="middle">'
        f'budget t_max (seconds{", log scale" if log_x else ""})</text>'
    )
    parts.append(
        f'<text x="16" y="{_MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MARGIN_T + plot_h / 2:.1f})">test metric of selection</text>'
    )

    legend_y = _MARGIN_T + 8
    legend_x = _WIDTH - _MARGIN_R + 12

    for index, curve in enumerate(curves):
        color = _COLORS[index % len(_COLORS)]
        pts = curve.points
        if pts:
            band = [f"{px(p.t_max_seconds):.1f},{py(p.p75):.1f}" for p in pts]
            band += [f"{px(p.t_max_seconds):.1f},{py(p.p25):.1f}" for p in reversed(pts)]
            parts.append(
                f'<polygon points="{" ".join(band)}" fill="{color}" fill-opacity="0.25" stroke="none"/>'
            )
            median = " ".join(f"{px(p.t_max_seconds):.1f},{py(p.median):.1f}" for p in pts)
            parts.append(
                f'<polyline points="{median}" fill="none" stroke="{color}" stroke-width="2"/>'
            )
        parts.append(
            f'<line x1="{legend_x}" y1="{legend_y + 4}" x2="{legend_x + 22}" y2="{legend_y + 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(f'<text x="{legend_x + 28}" y="{legend_y + 8}">{curve.strategy}</text>')
        legend_y += 18

    for index, (label, value) in enumerate(baselines):
        y = py(value)
        parts.append(
            f'<line x1="{_MARGIN_L}" y1="{y:.1f}" x2="{_WIDTH - _MARGIN_R}" y2="{y:.1f}" '
            f'stroke="#444" stroke-width="1.5" stroke-dasharray="6,4"/>'
        )
        parts.append(
            f'<line x1="{legend_x}" y1="{legend_y + 4}" x2="{legend_x + 22}" y2="{legend_y + 4}" '
            f'stroke="#444" stroke-width="1.5" stroke-dasharray="6,4"/>'
        )
        parts.append(f'<text x="{legend_x + 28}" y="{legend_y + 8}">{label}</text>')
        legend_y += 18

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
