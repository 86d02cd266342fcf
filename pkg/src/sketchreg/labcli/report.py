"""Slope fitting and report emission (CSV, optional SVG chart)."""
import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidPoints, IoError


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    target_slope: float = None
    within_tolerance: bool = None


def fit_rate(points, target_slope=None, tol=0.08):
    """Least squares of ``log(median error)`` on ``log n``.

    ``points`` is an iterable of ``(n, error)`` pairs; repeated ``n`` values
    are collapsed to their median first.
    """
    groups = {}
    for n, e in points:
        if not (e > 0 and math.isfinite(e)):
            raise InvalidPoints(f"error must be positive and finite, got {e} at n={n}")
        if not n > 0:
            raise InvalidPoints(f"n must be positive, got {n}")
        groups.setdefault(n, []).append(e)
    if len(groups) < 3:
        raise InvalidPoints(f"need at least 3 distinct n values, got {len(groups)}")
    ns = sorted(groups)
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log([float(np.median(groups[n])) for n in ns])
    xc = x - x.mean()
    slope = float(xc @ (y - y.mean()) / (xc @ xc))
    intercept = float(y.mean() - slope * x.mean())
    ss_res = float(np.sum((y - intercept - slope * x) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot <= 1e-300 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    within = None
    if target_slope is not None:
        within = abs(slope - target_slope) <= tol
    return RateFit(slope, intercept, r2, target_slope, within)


def format_value(v):
    """Shortest round-trip text for floats; plain text for everything else."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(table, exclude=()):
    cols = [j for j, c in enumerate(table.columns) if c not in exclude]
    lines = [",".join(table.columns[j] for j in cols)]
    for row in table.rows:
        lines.append(",".join(format_value(row[j]) for j in cols))
    return "\n".join(lines) + "\n"


def _nice_ticks(lo, hi):
    return [10.0**k for k in range(math.floor(lo), math.ceil(hi) + 1)]


def svg_loglog(xs, ys, title="", xlabel="n", ylabel="median error", fit=None, width=480, height=360):
    """A minimal log-log line chart as SVG text."""
    lx, ly = np.log10(xs), np.log10(ys)
    pad_l, pad_r, pad_t, pad_b = 64, 16, 32, 48
    x0, x1 = float(lx.min()), float(lx.max())
    y0, y1 = float(ly.min()), float(ly.max())
    if x1 - x0 < 1e-12:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 - y0 < 1e-12:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def px(v):
        return pad_l + (v - x0) / (x1 - x0) * (width - pad_l - pad_r)

    def py(v):
        return height - pad_b - (v - y0) / (y1 - y0) * (height - pad_t - pad_b)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<line x1="{pad_l}" y1="{height - pad_b}" x2="{width - pad_r}" y2="{height - pad_b}" stroke="black"/>',
           f'<line x1="{pad_l}" y1="{pad_t}" x2="{pad_l}" y2="{height - pad_b}" stroke="black"/>']
    for xv, yv in zip(lx, ly):
        out.append(f'<text x="{px(xv):.1f}" y="{height - pad_b + 14}" text-anchor="middle">'
                   f'{10 ** xv:.4g}</text>')
    for t in _nice_ticks(y0, y1):
        v = math.log10(t)
        if y0 - 1e-9 <= v <= y1 + 1e-9:
            out.append(f'<text x="{pad_l - 4}" y="{py(v) + 4:.1f}" text-anchor="end">{t:.0e}</text>')
    pts = " ".join(f"{px(a):.1f},{py(b):.1f}" for a, b in zip(lx, ly))
    out.append(f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="2"/>')
    for a, b in zip(lx, ly):
        out.append(f'<circle cx="{px(a):.1f}" cy="{py(b):.1f}" r="3" fill="steelblue"/>')
    if fit is not None:
        ln10 = math.log(10)
        fy0 = (fit.intercept + fit.slope * x0 * ln10) / ln10
        fy1 = (fit.intercept + fit.slope * x1 * ln10) / ln10
        out.append(f'<line x1="{px(x0):.1f}" y1="{py(fy0):.1f}" x2="{px(x1):.1f}" y2="{py(fy1):.1f}" '
                   'stroke="gray" stroke-dasharray="4 3"/>')
        note = f"slope {fit.slope:.3f}"
        if fit.target_slope is not None:
            note += f" (target {fit.target_slope:.3f})"
        out.append(f'<text x="{width - pad_r}" y="{pad_t - 8}" text-anchor="end">{note}</text>')
    out.append(f'<text x="{pad_l}" y="{pad_t - 8}">{title}</text>')
    out.append(f'<text x="{(width + pad_l) / 2:.0f}" y="{height - 8}" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="14" y="{(height - pad_b + pad_t) / 2:.0f}" text-anchor="middle" '
               f'transform="rotate(-90 14 {(height - pad_b + pad_t) / 2:.0f})">{ylabel}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _write(path, text):
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    except (OSError, UnicodeEncodeError) as exc:
        raise IoError(f"cannot write {path}: {exc}") from None


# x and y columns charted for each table layout
CHART_AXES = {"error_norm": "n", "test_mse": "n", "projection_error": "m", "proj_err": "n"}


def emit_report(table, csv_path, svg_path=None, fit=None, title=""):
    """Write the table as CSV and, optionally, a log-log chart of its medians."""
    if not table.rows:
        raise ValueError("nothing to report: the table is empty")
    _write(csv_path, csv_text(table))
    if svg_path is None:
        return
    ycol = next(c for c in CHART_AXES if c in table.columns)
    pts = [(x, y) for x, y in table.medians(CHART_AXES[ycol], ycol) if y > 0]
    if not pts:
        raise ValueError(f"no positive {ycol} values to chart")
    xs, ys = zip(*pts)
    _write(svg_path, svg_loglog(np.asarray(xs, float), np.asarray(ys, float), title,
                                CHART_AXES[ycol], f"median {ycol}", fit))
