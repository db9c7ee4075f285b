"""Minimal self-contained SVG line plots (no plotting dependency).

The CSV trace is the authoritative output; these plots are a quick visual
check, so rendering is deliberately simple: two stacked panels with autoscaled
axes, downsampled polylines, and a small legend.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

_PANEL_W = 900
_PANEL_H = 260
_MARGIN_L = 70
_MARGIN_R = 20
_MARGIN_T = 40
_GAP = 55
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_MAX_POINTS = 1600


def _downsample(arr: np.ndarray) -> np.ndarray:
    stride = max(1, arr.shape[0] // _MAX_POINTS)
    return arr[::stride]


def _scale(values: np.ndarray, lo: float, hi: float, out_lo: float, out_hi: float) -> np.ndarray:
    span = hi - lo
    if span <= 0.0:
        span = 1.0
    return out_lo + (values - lo) * (out_hi - out_lo) / span


def _panel(
    parts: list[str],
    t: np.ndarray,
    series: list[tuple[str, np.ndarray]],
    y_top: float,
    title: str,
) -> None:
    x0, x1 = _MARGIN_L, _MARGIN_L + _PANEL_W
    y0, y1 = y_top, y_top + _PANEL_H
    lo = min(float(np.min(values)) for _, values in series)
    hi = max(float(np.max(values)) for _, values in series)
    if lo == hi:
        lo -= 1.0
        hi += 1.0
    pad = 0.05 * (hi - lo)
    lo -= pad
    hi += pad
    parts.append(
        f'<rect x="{x0}" y="{y0}" width="{_PANEL_W}" height="{_PANEL_H}" '
        'fill="white" stroke="#888"/>'
    )
    parts.append(f'<text x="{x0}" y="{y0 - 8}" font-size="14" fill="#333">{title}</text>')
    for frac in (0.0, 0.5, 1.0):
        yv = lo + frac * (hi - lo)
        ypix = _scale(np.array([yv]), lo, hi, y1, y0)[0]
        parts.append(
            f'<line x1="{x0}" y1="{ypix:.1f}" x2="{x1}" y2="{ypix:.1f}" '
            'stroke="#ddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x0 - 6}" y="{ypix + 4:.1f}" font-size="11" fill="#333" '
            f'text-anchor="end">{yv:.3g}</text>'
        )
    t_lo, t_hi = float(t[0]), float(t[-1]) if t.shape[0] > 1 else float(t[0]) + 1.0
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        tv = t_lo + frac * (t_hi - t_lo)
        xpix = _scale(np.array([tv]), t_lo, t_hi, x0, x1)[0]
        parts.append(
            f'<text x="{xpix:.1f}" y="{y1 + 16}" font-size="11" fill="#333" '
            f'text-anchor="middle">{tv:.3g}</text>'
        )
    xs = _scale(t, t_lo, t_hi, x0, x1)
    for idx, (label, values) in enumerate(series):
        color = _COLORS[idx % len(_COLORS)]
        ys = _scale(values, lo, hi, y1, y0)
        points = " ".join(f"{x:.1f},{y:.1f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.2"/>'
        )
        lx = x1 - 120
        ly = y0 + 16 + 15 * idx
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 28}" y="{ly}" font-size="11" fill="#333">{label}</text>')


def write_scenario_svg(
    path: str | Path,
    t: np.ndarray,
    yr_ref: np.ndarray,
    yr_real: np.ndarray,
    u_cmd: np.ndarray,
    title: str,
) -> None:
    """Two-panel plot: reference vs actual yaw rate, and the control channels."""
    t_ds = _downsample(np.asarray(t, dtype=float))
    top = [("yr_ref", _downsample(np.asarray(yr_ref, dtype=float))),
           ("yr_real", _downsample(np.asarray(yr_real, dtype=float)))]
    u = np.atleast_2d(np.asarray(u_cmd, dtype=float))
    channel_names = ("u_cmdamp", "u_kright", "u_kleft", "u_alpha")
    bottom = []
    for j in range(u.shape[1]):
        name = channel_names[j] if j < len(channel_names) and u.shape[1] == 4 else f"u_{j}"
        bottom.append((name, _downsample(u[:, j])))

    height = _MARGIN_T + 2 * _PANEL_H + _GAP + 40
    width = _MARGIN_L + _PANEL_W + _MARGIN_R
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#fafafa"/>',
        f'<text x="{_MARGIN_L}" y="20" font-size="16" fill="#111">{title}</text>',
    ]
    _panel(parts, t_ds, top, _MARGIN_T, "yaw rate (rad/s) vs time (s)")
    _panel(parts, t_ds, bottom, _MARGIN_T + _PANEL_H + _GAP, "control channels vs time (s)")
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))
