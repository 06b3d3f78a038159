"""Minimal deterministic SVG emitter for spectra and convergence plots.

Hand-rolled on purpose: the artifacts must be byte-identical across runs,
which rules out plotting libraries that embed timestamps, font metrics, or
version strings.  Only the primitives needed here are implemented (axes,
ticks, polylines, stems, dashed annotation lines, text labels).
"""

from __future__ import annotations

import math

_W, _H = 640, 400
_ML, _MR, _MT, _MB = 64, 20, 36, 44  # margins: left/right/top/bottom


def _fmt(x: float) -> str:
    """Stable short float formatting for coordinates and labels."""
    return f"{x:.6g}"


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    """Round tick positions covering [lo, hi]."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if step >= raw:
            break
    t0 = math.ceil(lo / step) * step
    out = []
    t = t0
    while t <= hi + 1e-12 * abs(step):
        out.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return out


class _Canvas:
    def __init__(self, title: str, xlabel: str, ylabel: str):
        self.parts: list[str] = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">',
            f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
            f'<text x="{_W // 2}" y="22" text-anchor="middle" '
            f'font-family="monospace" font-size="14">{title}</text>',
            f'<text x="{_W // 2}" y="{_H - 8}" text-anchor="middle" '
            f'font-family="monospace" font-size="12">{xlabel}</text>',
            f'<text x="14" y="{_H // 2}" text-anchor="middle" '
            f'font-family="monospace" font-size="12" '
            f'transform="rotate(-90 14 {_H // 2})">{ylabel}</text>',
        ]

    def line(self, x1, y1, x2, y2, color="black", width=1.0, dash=""):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{color}" stroke-width="{width:g}"{d}/>'
        )

    def circle(self, x, y, r=3.0, color="#1f3d7a"):
        self.parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r:g}" fill="{color}"/>'
        )

    def rect(self, x, y, w, h, color="#dddddd"):
        self.parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" '
            f'fill="{color}"/>'
        )

    def text(self, x, y, s, size=11, anchor="start", color="black"):
        self.parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" text-anchor="{anchor}" '
            f'font-family="monospace" font-size="{size}" fill="{color}">{s}</text>'
        )

    def finish(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _frame(cv: _Canvas, xlo, xhi, ylo, yhi, ylog=False):
    """Draw axes with ticks; return data->pixel transforms."""
    px0, px1 = _ML, _W - _MR
    py0, py1 = _H - _MB, _MT

    def sx(x):
        return px0 + (x - xlo) / (xhi - xlo) * (px1 - px0)

    def sy(y):
        return py0 + (y - ylo) / (yhi - ylo) * (py1 - py0)

    cv.line(px0, py0, px1, py0)
    cv.line(px0, py0, px0, py1)
    for t in _ticks(xlo, xhi):
        cv.line(sx(t), py0, sx(t), py0 + 4)
        cv.text(sx(t), py0 + 16, _fmt(t), anchor="middle")
    if ylog:
        lo_e, hi_e = math.ceil(ylo), math.floor(yhi)
        for e in range(lo_e, hi_e + 1):
            cv.line(px0 - 4, sy(e), px0, sy(e))
            cv.text(px0 - 6, sy(e) + 4, f"1e{e}", anchor="end")
    else:
        for t in _ticks(ylo, yhi):
            cv.line(px0 - 4, sy(t), px0, sy(t))
            cv.text(px0 - 6, sy(t) + 4, _fmt(t), anchor="end")
    return sx, sy


def render_spectrum_svg(
    eigenvalues,
    kernel_dim: int,
    marker_value: float | None = None,
    title: str = "spectrum",
) -> str:
    """Stem plot of eigenvalue index vs value.

    The first ``kernel_dim`` stems are shaded as the kernel band; an
    optional horizontal marker line (for example twice the Einstein
    constant) is drawn and labelled.
    """
    vals = [float(v) for v in eigenvalues]
    n = len(vals)
    cv = _Canvas(title, "eigenvalue index", "eigenvalue")
    if n == 0:
        return cv.finish()
    ylo = min(0.0, min(vals))
    yhi = max(max(vals), marker_value or 0.0, 1e-12)
    yhi += 0.06 * (yhi - ylo)
    sx, sy = _frame(cv, -0.5, n - 0.5, ylo, yhi)
    if kernel_dim > 0:
        x0, x1 = sx(-0.5), sx(kernel_dim - 0.5)
        cv.rect(x0, _MT, x1 - x0, _H - _MB - _MT, color="#eeeeee")
        cv.text((x0 + x1) / 2, _MT + 14, f"kernel ({kernel_dim})", anchor="middle",
                color="#555555")
    if marker_value is not None:
        cv.line(sx(-0.5), sy(marker_value), sx(n - 0.5), sy(marker_value),
                color="#b03030", dash="6,4")
        cv.text(sx(n - 0.5), sy(marker_value) - 6, f"2c = {_fmt(marker_value)}",
                anchor="end", color="#b03030")
    base = sy(max(ylo, 0.0))
    for i, v in enumerate(vals):
        cv.line(sx(i), base, sx(i), sy(v), color="#1f3d7a")
        cv.circle(sx(i), sy(v))
    return cv.finish()


def render_convergence_svg(
    cutoffs,
    lambda1_values,
    title: str = "convergence",
) -> str:
    """Log-scale plot of |lambda1(cutoff) - lambda1(largest cutoff)|.

    The final cutoff serves as the reference, so the plotted series has one
    point fewer than the table; exact-at-all-rows studies clamp to the
    floor 1e-16.
    """
    cuts = [int(c) for c in cutoffs]
    lams = [float(v) for v in lambda1_values]
    cv = _Canvas(title, "basis cutoff", "|lambda1 - lambda1(max cutoff)|")
    if len(cuts) < 2:
        return cv.finish()
    ref = lams[-1]
    errs = [max(abs(v - ref), 1e-16) for v in lams[:-1]]
    ys = [math.log10(e) for e in errs]
    ylo = math.floor(min(ys)) - 0.5
    yhi = math.ceil(max(ys)) + 0.5
    xlo, xhi = cuts[0] - 0.5, cuts[-2] + 0.5
    sx, sy = _frame(cv, xlo, xhi, ylo, yhi, ylog=True)
    pts = " ".join(f"{_fmt(sx(c))},{_fmt(sy(y))}" for c, y in zip(cuts[:-1], ys))
    cv.parts.append(
        f'<polyline points="{pts}" fill="none" stroke="#1f3d7a" stroke-width="1.5"/>'
    )
    for c, y in zip(cuts[:-1], ys):
        cv.circle(sx(c), sy(y))
    cv.text(_W - _MR, _MT + 14, f"reference cutoff {cuts[-1]}", anchor="end",
            color="#555555")
    return cv.finish()
