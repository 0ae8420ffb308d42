"""Dependency-free SVG line plots with mean and two-standard-deviation bands."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from ..core import DEFAULT_WINDOW
from .experiment import RunResult

PLOT_KINDS = ("objective_vs_time", "gain_vs_iter", "overhead_vs_iter")
GRID_POINTS = 200
COLORS = ("#1f4fb4", "#111111", "#1a9a3a", "#b4299c", "#d2691e", "#7a7a00")

WIDTH, HEIGHT = 720, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 170, 40, 55


def step_interpolate(times: np.ndarray, values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Value of the latest completed iteration at each grid time (NaN before the first)."""
    pos = np.searchsorted(times, grid, side="right") - 1
    out = np.full(grid.shape, np.nan)
    ok = pos >= 0
    out[ok] = values[pos[ok]]
    return out


def time_grid(results: Sequence[RunResult], t_e: float, log_scale: bool, points: int = GRID_POINTS) -> np.ndarray:
    starts = [r.timestamps(t_e)[0] for r in results]
    ends = [r.timestamps(t_e)[-1] for r in results]
    lo, hi = min(starts), max(ends)
    if log_scale and lo > 0:
        return np.geomspace(lo, hi, points)
    return np.linspace(lo, hi, points)


def _curves(results: Sequence[RunResult], kind: str, t_e: float, log_scale: bool, window: int):
    """Per-algorithm ``(x, mean, std)`` and switch-point x positions."""
    labels = list(dict.fromkeys(r.algorithm for r in results))
    curves, markers = {}, []
    grid = time_grid(results, t_e, log_scale) if kind == "objective_vs_time" else None
    for label in labels:
        runs = [r for r in results if r.algorithm == label]
        if kind == "objective_vs_time":
            x = grid
            Y = np.array([step_interpolate(r.timestamps(t_e), r.best_curve(), grid) for r in runs])
        else:
            n = min(len(r.trace) for r in runs)
            if kind == "gain_vs_iter":
                series = [r.gain_series(t_e, window) for r in runs]
                x = series[0].iterations[: n - window].astype(float)
                Y = np.array([s.efficiencies[: n - window] for s in series])
            else:
                x = np.arange(1, n + 1, dtype=float)
                Y = np.array([r.trace.overheads[:n] for r in runs])
        with np.errstate(invalid="ignore"):
            mean = np.nanmean(Y, axis=0) if np.any(~np.isnan(Y)) else Y[0]
            std = np.nanstd(Y, axis=0)
        curves[label] = (x, mean, std)
        sps = {r.switch_point for r in runs if r.switch_point}
        for sp in sorted(sps):
            if kind == "objective_vs_time":
                markers.append(float(np.mean([r.timestamps(t_e)[sp - 1] for r in runs])))
            else:
                markers.append(float(sp))
    return curves, markers


def _svg_polyline(points, color, width=1.6, dash=None) -> str:
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline fill="none" stroke="{color}" stroke-width="{width}"{extra} points="{pts}"/>'


def render_plot(
    results: Sequence[RunResult],
    kind: str,
    path: str | Path,
    t_e: float = 1.0,
    log_time: bool = False,
    window: int = DEFAULT_WINDOW,
    title: str | None = None,
) -> Path:
    """Write an SVG with one mean line and a +-2 sd band per algorithm."""
    results = [r for r in results if r.ok]
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {PLOT_KINDS}")
    if not results:
        raise ValueError("need at least one result to plot")
    functions = {r.function for r in results}
    if len(functions) > 1:
        raise ValueError(f"cannot mix functions in one plot: {sorted(functions)}")
    function = functions.pop()
    log_x = log_time and kind == "objective_vs_time"
    curves, markers = _curves(results, kind, t_e, log_x, window)

    xs = np.concatenate([c[0] for c in curves.values()])
    lows = np.concatenate([c[1] - 2 * c[2] for c in curves.values()])
    highs = np.concatenate([c[1] + 2 * c[2] for c in curves.values()])
    finite = np.isfinite(lows) & np.isfinite(highs)
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(lows[finite].min()), float(highs[finite].max())
    if y_hi <= y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    tx = math.log10 if log_x else (lambda v: v)
    fx_lo, fx_hi = tx(x_lo), tx(x_hi)
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(v: float) -> float:
        return MARGIN_L + (tx(v) - fx_lo) / (fx_hi - fx_lo) * pw

    def py(v: float) -> float:
        return MARGIN_T + (1.0 - (v - y_lo) / (y_hi - y_lo)) * ph

    xlabel = {
        "objective_vs_time": f"computation time [s] (t_e = {t_e:g} s)",
        "gain_vs_iter": "iteration",
        "overhead_vs_iter": "iteration",
    }[kind]
    ylabel = {
        "objective_vs_time": "best objective value",
        "gain_vs_iter": f"gain per second (window {window})",
        "overhead_vs_iter": "overhead time [s]",
    }[kind]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-size="14">'
        f"{escape(title or f'{function}: {kind}')}</text>",
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="#888"/>',
    ]
    for frac in np.linspace(0.0, 1.0, 5):
        yv = y_lo + frac * (y_hi - y_lo)
        parts.append(
            f'<text x="{MARGIN_L - 6}" y="{py(yv) + 4:.2f}" text-anchor="end">{yv:.4g}</text>'
        )
        xv = 10 ** (fx_lo + frac * (fx_hi - fx_lo)) if log_x else x_lo + frac * (x_hi - x_lo)
        parts.append(
            f'<text x="{px(xv):.2f}" y="{HEIGHT - MARGIN_B + 16}" text-anchor="middle">{xv:.4g}</text>'
        )
    parts.append(
        f'<text x="{MARGIN_L + pw / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>'
    )
    parts.append(
        f'<text x="18" y="{MARGIN_T + ph / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {MARGIN_T + ph / 2:.0f})">{escape(ylabel)}</text>'
    )

    for idx, (label, (x, mean, std)) in enumerate(curves.items()):
        color = COLORS[idx % len(COLORS)]
        ok = np.isfinite(mean)
        upper = [(px(a), py(b)) for a, b in zip(x[ok], (mean + 2 * std)[ok])]
        lower = [(px(a), py(b)) for a, b in zip(x[ok], (mean - 2 * std)[ok])]
        if upper:
            band = " ".join(f"{a:.2f},{b:.2f}" for a, b in upper + lower[::-1])
            parts.append(f'<polygon class="band" fill="{color}" fill-opacity="0.18" stroke="none" points="{band}"/>')
            parts.append(_svg_polyline([(px(a), py(b)) for a, b in zip(x[ok], mean[ok])], color))
        ly = MARGIN_T + 14 + 20 * idx
        lx = WIDTH - MARGIN_R + 14
        parts.append(
            f'<g class="legend-entry"><line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"/><text x="{lx + 30}" y="{ly + 4}">{escape(label)}</text></g>'
        )
    for m in markers:
        if x_lo <= m <= x_hi:
            parts.append(
                f'<line class="switch-point" x1="{px(m):.2f}" y1="{MARGIN_T}" x2="{px(m):.2f}" '
                f'y2="{MARGIN_T + ph}" stroke="#8a2be2" stroke-dasharray="5,4"/>'
            )
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n")
    return path
