"""Trace CSV and SVG rendering. Both are byte-deterministic for fixed inputs."""

from __future__ import annotations

import csv
import io
from decimal import Decimal
from typing import Optional, Sequence

from .engine import JC_PLACES, TraceRecord
from .geometry import RealPoint, path_feasible
from .scenario import Scenario

CSV_HEADER = ("iteration", "precision", "waypoints", "j_c", "verdict", "elapsed_s")


def trace_row(r: TraceRecord, timings: bool = True) -> str:
    elapsed = f"{r.elapsed_s:.6f}" if timings and r.elapsed_s is not None else ""
    return f"{r.iteration},{r.precision},{r.waypoints},{r.j_c:.{JC_PLACES}f},{r.verdict},{elapsed}\n"


def emit_trace_csv(trace: Sequence[TraceRecord], timings: bool = True) -> str:
    """One row per oracle call. With ``timings=False`` the elapsed column is left empty."""
    return ",".join(CSV_HEADER) + "\n" + "".join(trace_row(r, timings) for r in trace)


def parse_trace_csv(text: str) -> list[TraceRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError("not a trace CSV: bad header")
    out = []
    for row in rows[1:]:
        it, p, m, jc, verdict, elapsed = row
        out.append(TraceRecord(int(it), int(p), int(m), Decimal(jc), verdict,
                               float(elapsed) if elapsed else None))
    return out


def _n(v) -> str:
    """Fixed-point number with trailing zeros stripped."""
    s = f"{float(v):.4f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def emit_svg(scenario: Scenario, path: Optional[Sequence[RealPoint]] = None, scale: float = 50.0,
             margin: float = 0.5, title: str = "") -> str:
    """Environment box, obstacles with their safety rings, S/T markers and the path polyline.

    The y axis points up, as in the scenario coordinates.
    """
    if path is not None:
        if any(not scenario.bounds.contains(pt) for pt in path):
            raise ValueError("path vertex outside the environment")
        if not path_feasible(list(path), scenario):
            raise ValueError("path is not feasible")
    b = scenario.bounds
    x0 = float(b.x_min) - margin
    y0 = float(b.y_min) - margin
    w = (float(b.width) + 2 * margin) * scale
    h = (float(b.height) + 2 * margin) * scale

    def sx(x):
        return _n((float(x) - x0) * scale)

    def sy(y):
        return _n(h - (float(y) - y0) * scale)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_n(w)}" height="{_n(h)}" '
        f'viewBox="0 0 {_n(w)} {_n(h)}">',
    ]
    if title:
        esc = title.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        out.append(f"  <title>{esc}</title>")
    out.append(
        f'  <rect class="environment" x="{sx(b.x_min)}" y="{sy(b.y_max)}" '
        f'width="{_n(float(b.width) * scale)}" height="{_n(float(b.height) * scale)}" '
        'fill="white" stroke="black" stroke-width="1"/>'
    )
    for o in scenario.obstacles:
        cx, cy = sx(o.center.x), sy(o.center.y)
        out.append(f'  <circle class="obstacle" cx="{cx}" cy="{cy}" r="{_n(float(o.radius) * scale)}" '
                   'fill="#999999" stroke="none"/>')
        if scenario.sigma > 0:
            out.append(f'  <circle class="margin" cx="{cx}" cy="{cy}" '
                       f'r="{_n(float(o.radius + scenario.sigma) * scale)}" fill="none" '
                       'stroke="#555555" stroke-width="1" stroke-dasharray="4 3"/>')
    if path is not None:
        pts = " ".join(f"{sx(p.x)},{sy(p.y)}" for p in path)
        out.append(f'  <polyline class="path" points="{pts}" fill="none" stroke="#1f5fbf" stroke-width="2"/>')
        for p in path[1:-1]:
            out.append(f'  <circle class="waypoint" cx="{sx(p.x)}" cy="{sy(p.y)}" r="3" fill="#1f5fbf"/>')
    r = _n(0.15 * scale)
    for label, pt, colour in (("S", scenario.start, "#2a9d3a"), ("T", scenario.target, "#c0392b")):
        out.append(f'  <circle class="marker" cx="{sx(pt.x)}" cy="{sy(pt.y)}" r="{r}" fill="{colour}"/>')
        out.append(f'  <text x="{sx(pt.x)}" y="{_n((h - (float(pt.y) - y0) * scale) - 0.25 * scale)}" '
                   f'font-family="sans-serif" font-size="{_n(0.4 * scale)}" text-anchor="middle">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
