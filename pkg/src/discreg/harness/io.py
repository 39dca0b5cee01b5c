"""Sweep result CSV round-trip and a minimal SVG line plot."""

import csv
import math
from pathlib import Path
from xml.sax.saxutils import escape

from .runner import SweepResult, SweepRow

HEADER = ["experiment", "secondary", "sweep", "loss_mean", "ci_low", "ci_high", "n_reps"]


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for r in result.rows:
            w.writerow([r.experiment, _fmt(r.secondary), _fmt(r.sweep), _fmt(r.loss_mean),
                        _fmt(r.ci_low), _fmt(r.ci_high), str(int(r.n_reps))])


def read_csv(path) -> SweepResult:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        for rec in reader:
            rows.append(SweepRow(rec[0], *(float(v) for v in rec[1:6]), int(rec[6])))
    return SweepResult(rows=rows)


_PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]


def _star(cx, cy, r=7.0):
    pts = []
    for k in range(10):
        rad = r if k % 2 == 0 else r * 0.45
        ang = -math.pi / 2 + k * math.pi / 5
        pts.append(f"{cx + rad * math.cos(ang):.2f},{cy + rad * math.sin(ang):.2f}")
    return " ".join(pts)


def emit_svg(result: SweepResult, path, width: int = 640, height: int = 420, xlabel: str = "sweep",
             ylabel: str = "loss") -> None:
    """One line per curve, shaded CI band, star at each curve's minimum."""
    left, right, top, bottom = 70, 130, 20, 50
    pw, ph = width - left - right, height - top - bottom
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="sans-serif" font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>']
    curves = result.curves()
    if curves:
        xs = [r.sweep for r in result.rows]
        lo = min(r.ci_low for r in result.rows)
        hi = max(r.ci_high for r in result.rows)
        x0, x1 = min(xs), max(xs)
        if x1 == x0:
            x0, x1 = x0 - 0.5, x1 + 0.5
        if hi == lo:
            lo, hi = lo - 0.5, hi + 0.5

        def sx(x):
            return left + (x - x0) / (x1 - x0) * pw

        def sy(y):
            return top + (hi - y) / (hi - lo) * ph

        out.append(f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>')
        out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>')
        for k in range(5):
            xv = x0 + (x1 - x0) * k / 4
            yv = lo + (hi - lo) * k / 4
            out.append(f'<text x="{sx(xv):.1f}" y="{top + ph + 16}" text-anchor="middle">{xv:.4g}</text>')
            out.append(f'<text x="{left - 6}" y="{sy(yv) + 4:.1f}" text-anchor="end">{yv:.4g}</text>')
        out.append(f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
        out.append(f'<text x="16" y="{top + ph / 2}" transform="rotate(-90 16 {top + ph / 2})" '
                   f'text-anchor="middle">{escape(ylabel)}</text>')
        for idx, (sec, rows) in enumerate(curves.items()):
            color = _PALETTE[idx % len(_PALETTE)]
            upper = [f"{sx(r.sweep):.2f},{sy(r.ci_high):.2f}" for r in rows]
            lower = [f"{sx(r.sweep):.2f},{sy(r.ci_low):.2f}" for r in reversed(rows)]
            out.append(f'<polygon points="{" ".join(upper + lower)}" fill="{color}" fill-opacity="0.2" stroke="none"/>')
            line = " ".join(f"{sx(r.sweep):.2f},{sy(r.loss_mean):.2f}" for r in rows)
            out.append(f'<polyline points="{line}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            best = min(rows, key=lambda r: r.loss_mean)
            out.append(f'<polygon class="argmin" points="{_star(sx(best.sweep), sy(best.loss_mean))}" fill="{color}"/>')
            ly = top + 14 * idx + 6
            out.append(f'<line x1="{left + pw + 12}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" stroke="{color}" '
                       f'stroke-width="2"/>')
            out.append(f'<text x="{left + pw + 34}" y="{ly + 4}">{sec:.4g}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
